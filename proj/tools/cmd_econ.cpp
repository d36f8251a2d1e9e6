#include <sstream>
#include <string>

#include "commands.hpp"
#include "report_util.hpp"
#include "txamp/econ.hpp"
#include "txamp/io.hpp"

namespace txamp::cli {

econ::PricingSchedule pricing_from_config(const Config& cfg) {
  if (!cfg.has("econ.pricing_tiers")) return econ::PricingSchedule::aws_default();
  // "10:90,50:85,150:70,inf:50"
  const std::string raw = cfg.get_string("econ.pricing_tiers");
  std::vector<econ::PriceTier> tiers;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw parameter_error("econ.pricing_tiers items must be bound:price, got '" + item + "'");
    const std::string bound = item.substr(0, colon);
    try {
      const double upper = (bound.find("inf") != std::string::npos)
                               ? std::numeric_limits<double>::infinity()
                               : std::stod(bound);
      tiers.push_back({upper, std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw parameter_error("econ.pricing_tiers item is not numeric: '" + item + "'");
    }
  }
  return econ::PricingSchedule(tiers);
}

int cmd_econ(const Config& cfg, const std::string& out_dir) {
  const auto dir = ensure_out_dir(out_dir);
  const econ::PricingSchedule schedule = pricing_from_config(cfg);

  // outbound cost and EAF over the traffic grid
  const double grid_start = cfg.get_double("econ.grid_start_tb", 0.0);
  const double grid_stop = cfg.get_double("econ.grid_stop_tb", 200.0);
  const double grid_step = cfg.get_double("econ.grid_step_tb", 1.0);
  if (grid_step <= 0.0) throw parameter_error("econ.grid_step_tb must be positive");
  std::vector<double> grid;
  for (double t = grid_start; t <= grid_stop + 1e-9; t += grid_step) grid.push_back(t);

  std::vector<std::vector<std::string>> cost_rows;
  for (double t : grid) cost_rows.push_back({fmt(t), fmt(econ::outbound_cost(t, schedule))});
  write_csv(dir / "outbound_cost.csv", {"traffic_tb", "cost_usd"}, cost_rows);

  const double taf = cfg.get_double("econ.taf", 3638.6);
  const double external_share = cfg.get_double("econ.external_share", 0.8);
  const double internal_price = cfg.get_double("econ.internal_price_usd_per_tb", 20.0);
  const double attacker_price = cfg.get_double("econ.attacker_price_usd_per_tb", 20.0);
  const auto curve =
      econ::eaf_curve(taf, grid, schedule, attacker_price, external_share, internal_price);
  std::vector<std::vector<std::string>> eaf_rows;
  for (const auto& pt : curve) eaf_rows.push_back({fmt(pt.traffic_tb), fmt(pt.eaf)});
  write_csv(dir / "eaf_curve.csv", {"traffic_tb", "eaf"}, eaf_rows);

  // latency value model
  econ::LatencyValueModel model;
  if (cfg.has("econ.poly")) {
    const auto coeffs = cfg.get_double_list("econ.poly");
    if (coeffs.size() != 4) throw parameter_error("econ.poly needs 4 coefficients");
    for (std::size_t i = 0; i < 4; ++i) model.coefficients[i] = coeffs[i];
  }
  model.avg_bid_eth = cfg.get_double("econ.avg_bid_eth", model.avg_bid_eth);
  model.eth_usd = cfg.get_double("econ.eth_usd", model.eth_usd);
  model.blocks_per_month = cfg.get_double("econ.blocks_per_month", model.blocks_per_month);

  std::vector<double> points{0.409, 1.0, 2.0, 2.5};
  if (cfg.has("econ.latency_points")) points = cfg.get_double_list("econ.latency_points");
  std::vector<std::vector<std::string>> profit_rows;
  for (double x : points) {
    const auto profit = econ::latency_profit(model, x);
    profit_rows.push_back(
        {fmt(x), fmt(profit.pct_per_ms), fmt(profit.eth_per_ms), fmt(profit.usd_per_ms)});
  }
  write_csv(dir / "latency_profit.csv", {"slot_seconds", "pct_per_ms", "eth_per_ms", "usd_per_ms"},
            profit_rows);

  OrderedJson summary;
  summary["argmax_profit_rate_s"] = sig(model.argmax_profit_rate());
  const auto best = econ::latency_profit(model, model.argmax_profit_rate());
  summary["usd_per_ms_at_max"] = sig(best.usd_per_ms);
  OrderedJson benefits;
  std::vector<double> savings{1.0};
  if (cfg.has("econ.ms_saved")) savings = cfg.get_double_list("econ.ms_saved");
  for (double ms : savings)
    benefits[fmt(ms)] = sig(econ::monthly_benefit(model, ms));
  summary["monthly_benefit_usd_by_ms_saved"] = benefits;
  summary["eaf_first_tier"] = sig(curve.empty() ? 0.0 : curve.front().eaf);
  summary["internal_price_note"] =
      "intra-cloud price defaults to a reconstruction; override econ.internal_price_usd_per_tb";
  write_json(dir / "econ_summary.json", summary);
  return 0;
}

}  // namespace txamp::cli
