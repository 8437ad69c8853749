#include "fpaudit/calibration.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#ifndef FPAUDIT_CONFIG_PATH
#define FPAUDIT_CONFIG_PATH "config/calibration.json"
#endif

namespace fpaudit {

using nlohmann::json;

std::string default_calibration_path() { return FPAUDIT_CONFIG_PATH; }

Calibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open calibration file: " + path);
  }
  json j = json::parse(in);
  Calibration c;
  c.hanson_wright_c1 = j.at("hanson_wright_c1").get<double>();
  const auto& pl = j.at("prior_lambda_min");
  c.prior_lambda_min_d = pl.at("d").get<int>();
  c.prior_lambda_min_c = pl.at("c").get<double>();
  const auto& dc = j.at("dp_cov");
  c.dp_cov.d = dc.at("d").get<int>();
  c.dp_cov.n = dc.at("n").get<int>();
  c.dp_cov.epsilon = dc.at("epsilon").get<double>();
  c.dp_cov.delta = dc.at("delta").get<double>();
  c.dp_cov.radius = dc.at("radius").get<double>();
  c.dp_cov.gamma = dc.at("gamma").get<double>();
  const auto& dm = j.at("dp_mean");
  c.dp_mean.d = dm.at("d").get<int>();
  c.dp_mean.n = dm.at("n").get<int>();
  c.dp_mean.epsilon = dm.at("epsilon").get<double>();
  c.dp_mean.delta = dm.at("delta").get<double>();
  c.dp_mean.radius = dm.at("radius").get<double>();
  c.dp_mean.alpha = dm.at("alpha").get<double>();
  const auto& sh = j.at("shrunk");
  c.shrunk.d = sh.at("d").get<int>();
  c.shrunk.n = sh.at("n").get<int>();
  c.shrunk.delta = sh.at("delta").get<double>();
  c.shrunk.radius = sh.at("radius").get<double>();
  c.shrunk.signal_power = sh.at("signal_power").get<double>();
  c.attack_ceiling_c = j.at("attack_ceiling_c").get<double>();
  return c;
}

void save_calibration(const Calibration& c, const std::string& path) {
  json j;
  j["hanson_wright_c1"] = c.hanson_wright_c1;
  j["prior_lambda_min"] = {{"d", c.prior_lambda_min_d},
                           {"c", c.prior_lambda_min_c}};
  j["dp_cov"] = {{"d", c.dp_cov.d},         {"n", c.dp_cov.n},
                 {"epsilon", c.dp_cov.epsilon}, {"delta", c.dp_cov.delta},
                 {"radius", c.dp_cov.radius},   {"gamma", c.dp_cov.gamma}};
  j["dp_mean"] = {{"d", c.dp_mean.d},           {"n", c.dp_mean.n},
                  {"epsilon", c.dp_mean.epsilon}, {"delta", c.dp_mean.delta},
                  {"radius", c.dp_mean.radius},   {"alpha", c.dp_mean.alpha}};
  j["shrunk"] = {{"d", c.shrunk.d},
                 {"n", c.shrunk.n},
                 {"delta", c.shrunk.delta},
                 {"radius", c.shrunk.radius},
                 {"signal_power", c.shrunk.signal_power}};
  j["attack_ceiling_c"] = c.attack_ceiling_c;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace fpaudit
