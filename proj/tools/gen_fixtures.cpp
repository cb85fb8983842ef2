// Regenerates the frozen reference values under data/fixtures/. Each file
// records one scalar produced by an independent oracle implementation so
// the fast production paths can be diffed against pinned numbers.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "pflab/config.hpp"
#include "pflab/linalg.hpp"
#include "pflab/oracle.hpp"

using namespace pflab;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string today() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

void emit(const fs::path& dir, const std::string& quantity,
          const ordered_json& inputs, double value,
          const std::string& oracle) {
  ordered_json j;
  j["quantity"] = quantity;
  j["inputs"] = inputs;
  j["value"] = value;
  j["oracle"] = oracle;
  j["date"] = today();
  write_file((dir / (quantity + ".json")).string(), j.dump(2) + "\n");
  std::printf("%s = %s\n", quantity.c_str(), fmt_double(value).c_str());
}

const char* kTwoLevel = R"(
model {
  K = [[0, 0], [0, 1]]
  channel_weights = [1]
  coupling {
    profile { i = 0  j = 1  family = power_exp  amp = 1  p = 1  a = 1 }
    profile { i = 1  j = 0  family = power_exp  amp = 1  p = 1  a = 1 }
  }
}
grid { n_r = 400  r_max = 10 }
truncation { n_max = 1 }
run { d = 3 }
)";

const char* kCommuting = R"(
model {
  K = [[0, 0], [0, 1]]
  channel_weights = [1]
  coupling {
    vanhove { family = power_exp  amp = 1  p = 1  a = 1 }
  }
}
grid { n_r = 40  r_max = 8 }
truncation { n_max = 2 }
run { d = 3 }
)";

const char* kTiny = R"(
model {
  K = [[0, 0], [0, 1]]
  channel_weights = [1]
  coupling {
    profile { i = 0  j = 1  family = power_exp  amp = 1  p = 1  a = 1 }
    profile { i = 1  j = 0  family = power_exp  amp = 1  p = 1  a = 1 }
  }
}
grid { n_r = 6  r_max = 4 }
truncation { n_max = 2 }
run { d = 3 }
)";

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? argv[1] : "data/fixtures";
  fs::create_directories(dir);

  {
    ExperimentConfig cfg = parse_experiment(kTwoLevel);
    ContinuumFactor cf = build_continuum(cfg);
    FgrAnalytic an = fgr_analytic(make_atom(cfg.K), 1, cf);
    ordered_json in;
    in["config"] = kTwoLevel;
    in["i0"] = 1;
    emit(dir, "fgr_c2_analytic", in, an.c2, "fgr_analytic");
  }

  {
    ExperimentConfig cfg = parse_experiment(kTwoLevel);
    Model m = build_model(cfg, 1.0);
    SecondOrder so = oracle_second_order(m, 1, 1e-2);
    ordered_json in;
    in["config"] = kTwoLevel;
    in["atom_eigindex"] = 1;
    in["eps"] = 1e-2;
    emit(dir, "second_order_shift_coeff", in, so.shift_coeff,
         "oracle_second_order");
    emit(dir, "second_order_width", in, so.width, "oracle_second_order");
  }

  {
    ExperimentConfig cfg = parse_experiment(kCommuting);
    Model m = build_model(cfg, 0.1);
    VecR omega(m.grid.modes());
    for (int mo = 0; mo < m.grid.modes(); ++mo)
      omega[mo] = m.grid.nodes[m.grid.rindex(mo)];
    double shift = oracle_vanhove_shift(0.1, m.alpha.at(0, 0), omega);
    ordered_json in;
    in["config"] = kCommuting;
    in["lambda"] = 0.1;
    in["level"] = 0;
    emit(dir, "vanhove_ground_shift", in, shift, "oracle_vanhove_shift");
  }

  {
    ExperimentConfig cfg = parse_experiment(kTiny);
    Model m = build_model(cfg, 0.3);
    MatC H = oracle_hamiltonian(m);
    VecR ev = heig_values(H);
    ordered_json in;
    in["config"] = kTiny;
    in["lambda"] = 0.3;
    emit(dir, "tiny_ground_energy", in, ev[0], "oracle_hamiltonian");
  }

  return 0;
}
