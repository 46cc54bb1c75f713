#include "deblur/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "deblur/errors.hpp"

namespace deblur {

namespace {

using nlohmann::json;

double snap_exponent(double p) {
  for (double target : {0.5, 2.0 / 3.0, 2.0})
    if (std::abs(p - target) < 1e-3) return target;
  return p;  // validate() rejects it with a clear message
}

void apply_nonblind(const json& j, NonBlindParams& nb) {
  for (const auto& [key, value] : j.items()) {
    if (key == "fidelity_weight") nb.fidelity_weight = value.get<double>();
    else if (key == "prior_exponent") {
      if (value.is_string()) {
        std::string s = value.get<std::string>();
        if (s == "1/2") nb.prior_exponent = 0.5;
        else if (s == "2/3") nb.prior_exponent = 2.0 / 3.0;
        else if (s == "2") nb.prior_exponent = 2.0;
        else throw InvalidArgumentError("prior_exponent must be 1/2, 2/3 or 2, got '" + s + "'");
      } else {
        nb.prior_exponent = snap_exponent(value.get<double>());
      }
    }
    else if (key == "hq_iters") nb.hq_iters = value.get<int>();
    else if (key == "penalty_init") nb.penalty_init = value.get<double>();
    else if (key == "penalty_step") nb.penalty_step = value.get<double>();
    else throw InvalidArgumentError("unknown nonblind config key '" + key + "'");
  }
}

}  // namespace

void apply_config_json(const std::string& json_text, SolverParams& solver,
                       NonBlindParams& nonblind) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgumentError("config must be a JSON object");

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "lambda") solver.lambda = value.get<double>();
      else if (key == "alpha_x") solver.alpha_x = value.get<double>();
      else if (key == "beta_x") solver.beta_x = value.get<double>();
      else if (key == "alpha_k") solver.alpha_k = value.get<double>();
      else if (key == "beta_k") solver.beta_k = value.get<double>();
      else if (key == "gamma_x") solver.gamma_x = value.get<double>();
      else if (key == "gamma_k") solver.gamma_k = value.get<double>();
      else if (key == "c_x") solver.c_x = value.get<double>();
      else if (key == "c_k") solver.c_k = value.get<double>();
      else if (key == "outer_iters") solver.outer_iters = value.get<int>();
      else if (key == "inner_iters_image") solver.inner_iters_image = value.get<int>();
      else if (key == "inner_iters_kernel") solver.inner_iters_kernel = value.get<int>();
      else if (key == "scales") solver.scales = value.get<int>();
      else if (key == "kernel_size") solver.kernel_size = value.get<int>();
      else if (key == "pyramid_factor") solver.pyramid_factor = value.get<double>();
      else if (key == "variant") solver.variant = variant_from_string(value.get<std::string>());
      else if (key == "nonblind") apply_nonblind(value, nonblind);
      else throw InvalidArgumentError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad config value: ") + e.what());
  }
  validate(solver);
  validate(nonblind);
}

std::string trace_to_json(const DeblurResult& result) {
  json j;
  j["elapsed_seconds"] = result.elapsed_seconds;
  j["scales"] = json::array();
  for (const ScaleTrace& st : result.traces) {
    json s;
    s["level"] = st.level;
    s["width"] = st.width;
    s["height"] = st.height;
    s["kernel_size"] = st.kernel_size;
    s["outer"] = json::array();
    for (const OuterTrace& ot : st.outer) {
      auto sample = [](const EnergySample& e) {
        return json{{"fidelity", e.fidelity}, {"l0", e.l0}, {"l2", e.l2}, {"total", e.total}};
      };
      s["outer"].push_back({{"image", sample(ot.image)}, {"kernel", sample(ot.kernel)}});
    }
    j["scales"].push_back(std::move(s));
  }
  return j.dump(2);
}

}  // namespace deblur
