#include <string>

#include "commands.hpp"
#include "report_util.hpp"
#include "txamp/io.hpp"
#include "txamp/model.hpp"

namespace txamp::cli {

namespace {

model::PropagationPolicy policy_from_config(const Config& cfg) {
  const std::string kind = cfg.get_string("model.policy", "aggressive");
  if (kind == "sqrt") return model::PropagationPolicy::sqrt_policy();
  if (kind == "aggressive") return model::PropagationPolicy::aggressive();
  if (kind == "constant")
    return model::PropagationPolicy::constant_peers(
        static_cast<int>(cfg.get_int("model.constant_broadcast", 3)),
        static_cast<int>(cfg.get_int("model.constant_announce", 6)));
  throw parameter_error("model.policy must be sqrt, aggressive or constant, got '" + kind + "'");
}

model::ConnectionDistribution distribution_from_config(const Config& cfg, int max_connections) {
  const std::string spec = cfg.get_string("model.distribution", "pointmass:41");
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "pointmass") {
    try {
      return model::ConnectionDistribution::point_mass(std::stod(arg));
    } catch (const std::exception&) {
      throw parameter_error("model.distribution pointmass needs a number, got '" + arg + "'");
    }
  }
  if (kind == "empirical") {
    std::vector<double> samples;
    io::for_each_csv_row(arg, [&](std::size_t line, const std::vector<std::string>& fields) {
      samples.push_back(io::parse_double(fields.front(), arg, line));
    });
    return model::ConnectionDistribution::empirical(std::move(samples));
  }
  if (kind == "density") {
    // x, g(x) table at fixed steps; renormalized to absorb rounding drift
    std::vector<double> xs, gs;
    io::for_each_csv_row(arg, [&](std::size_t line, const std::vector<std::string>& fields) {
      if (fields.size() != 2) throw parse_error(arg, line, "expected x, g(x)");
      xs.push_back(io::parse_double(fields[0], arg, line));
      gs.push_back(io::parse_double(fields[1], arg, line));
    });
    if (xs.size() < 2) throw parse_error(arg, 0, "density table needs at least two rows");
    const double step = xs[1] - xs[0];
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < gs.size(); ++i) mass += 0.5 * (gs[i] + gs[i + 1]) * step;
    if (mass <= 0.0) throw parse_error(arg, 0, "density table has no mass");
    for (double& g : gs) g /= mass;
    return model::ConnectionDistribution::smoothed(std::move(gs), step, xs.front());
  }
  (void)max_connections;
  throw parameter_error("model.distribution must be pointmass:<x>, empirical:<file> or "
                        "density:<file>, got '" + spec + "'");
}

}  // namespace

int cmd_model(const Config& cfg, const std::string& out_dir) {
  model::AmplificationParams params;
  params.tx_size = cfg.get_double("model.a_bytes", 560.0);
  params.modified_ratio = cfg.get_double("model.gamma", 0.015);
  params.policy = policy_from_config(cfg);
  params.total_nodes = cfg.get_double("model.n", 6000.0);
  params.announce_size = cfg.get_double("model.announce_size", 32.0);
  params.modified_connection_count = static_cast<int>(cfg.get_int("model.c", 50));
  params.max_connections = static_cast<int>(cfg.get_int("model.max_connections", 1000));
  const auto g = distribution_from_config(cfg, params.max_connections);

  const double waste_network = model::network_waste(params, g);
  const double waste_per_node = model::expected_node_waste(params, g);
  const double taf = model::taf(params, g);

  const econ::PricingSchedule schedule = pricing_from_config(cfg);
  const double external_share = cfg.get_double("econ.external_share", 0.8);
  const double internal_price = cfg.get_double("econ.internal_price_usd_per_tb", 20.0);
  const double attacker_price = cfg.get_double("econ.attacker_price_usd_per_tb", 20.0);
  const double victim_price =
      external_share * schedule.average_price(0.0) + (1.0 - external_share) * internal_price;
  const double eaf = model::eaf(taf, victim_price, attacker_price);

  OrderedJson doc;
  doc["policy"] = model::to_string(params.policy.kind);
  doc["a"] = sig(params.tx_size);
  doc["gamma"] = sig(params.modified_ratio);
  doc["N"] = sig(params.total_nodes);
  doc["waste_per_node"] = sig(waste_per_node);
  doc["waste_network"] = sig(waste_network);
  doc["taf"] = sig(taf);
  doc["eaf"] = sig(eaf);

  OrderedJson meta;
  const double gamma_n = params.modified_ratio * params.total_nodes;
  if (gamma_n > 0.0)
    meta["waste_per_modified_gamma_n"] = sig(model::modified_node_waste(waste_network, gamma_n));
  if (cfg.has("model.observed_modified_count"))
    meta["waste_per_modified_observed"] = sig(model::modified_node_waste(
        waste_network, cfg.get_double("model.observed_modified_count")));
  meta["victim_price_usd_per_tb"] = sig(victim_price);
  meta["victim_price_note"] =
      "blend of the first-tier external rate and the intra-cloud rate; the intra-cloud "
      "component is a reconstruction, not a published price";
  doc["metadata"] = meta;

  write_json(ensure_out_dir(out_dir) / "model.json", doc);
  return 0;
}

}  // namespace txamp::cli
