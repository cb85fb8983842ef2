#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pflab/fermi.hpp"
#include "pflab/secondquant.hpp"

namespace pflab {

// ---- generic key-value config tree ----
//
//   key = scalar            # comment
//   key = [v1, v2, [w1]]    # arrays nest
//   key = (re, im)          # complex scalar
//   block { key = v ... }   # nested blocks ('=' before '{' optional)
//
// Scalars run to whitespace or a delimiter; quote "..." to include either.

struct CfgValue {
  enum class Type { scalar, array, block };
  Type type = Type::block;
  int line = 0;
  std::string text;                                    // scalar
  std::vector<CfgValue> items;                         // array
  std::vector<std::pair<std::string, CfgValue>> kv;    // block, ordered
};

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("config:" + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

CfgValue parse_config_text(const std::string& text);
CfgValue parse_config_file(const std::string& path);

// dotted-path lookup into nested blocks; nullptr when absent
const CfgValue* cfg_find(const CfgValue& root, const std::string& path);
const CfgValue& cfg_get(const CfgValue& root, const std::string& path);

double cfg_double(const CfgValue& v);
int cfg_int(const CfgValue& v);
bool cfg_bool(const CfgValue& v);
cd cfg_complex(const CfgValue& v);
std::string cfg_string(const CfgValue& v);
std::vector<double> cfg_double_list(const CfgValue& v);

double cfg_double_or(const CfgValue& root, const std::string& path, double d);
int cfg_int_or(const CfgValue& root, const std::string& path, int d);
std::string cfg_string_or(const CfgValue& root, const std::string& path,
                          const std::string& d);

// schedule: [v1, v2, ...] | {kind=geom|linear, start, stop, count}
std::vector<double> parse_schedule(const CfgValue& v);

// lambda-dependent knob: scalar constant | {kind=pow, scale, exponent}
// (value(lambda) = scale * |lambda|^exponent)
struct PowerKnob {
  bool is_pow = false;
  double constant = 0;
  double scale = 1, exponent = 0;
  double operator()(double lambda) const;
};
PowerKnob parse_power_knob(const CfgValue& v);

// ---- experiment configs ----

struct ProfileSpec {
  int i = 0, j = 0, channel = 0;
  bool is_family = false;  // power_exp: f(r) = amp * r^p * exp(-a r)
  cd amp = cd(1, 0);
  double p = 1, a = 1;
  VecC samples;  // used when !is_family; one value per radial node
  int line = 0;
};

struct ExperimentConfig {
  CfgValue root;
  std::string source_text;

  MatC K;
  int n_r = 0, n_ch = 1;
  double r_max = 0;
  QuadRule rule = QuadRule::midpoint;
  int n_max = 1;
  double e_max = -1;
  int d = 3;
  std::vector<double> channel_weights;
  std::vector<ProfileSpec> profiles;
  std::string command;
};

ExperimentConfig parse_experiment(const std::string& text);
ExperimentConfig load_experiment(const std::string& path);

// evaluate profile spec as a continuum radial function (family or
// piecewise-constant from samples)
cd profile_value(const ProfileSpec& ps, const RadialGrid& g, double r);

Model build_model(const ExperimentConfig& cfg, double lambda);
ContinuumFactor build_continuum(const ExperimentConfig& cfg);

// ---- hypothesis validation ----
//
// The checks apply to the reduced radial coupling s(r) = sqrt(w_ch)
// r^{(d-1)/2} f(r), the function that actually lives in L^2(R+, dr).
// For the power_exp family the effective small-r exponent is
// p_eff = p + (d-1)/2 and the rules are closed-form:
//   weight omega^{-1/2}: finite iff p_eff > 0
//   d/dr in L^2:         finite iff p_eff > 1/2
//   omega^{-1/2} d/dr:   finite iff p_eff > 1
//   omega^{-a}:          finite iff p_eff > a - 1/2
// Sampled profiles only report grid norms (not decidable).

enum class HypStatus { satisfied, violated, not_decidable, out_of_scope };

struct HypothesisRow {
  std::string name;
  HypStatus status = HypStatus::not_decidable;
  double grid_norm = 0;      // on the configured grid
  double refined_ratio = 0;  // norm growth under grid refinement x4
  std::string note;
};

std::vector<HypothesisRow> validate_hypotheses(const ExperimentConfig& cfg,
                                               double i1b_a = 1.5);
bool hypotheses_ok(const std::vector<HypothesisRow>& rows);
std::string hyp_status_name(HypStatus s);

}  // namespace pflab
