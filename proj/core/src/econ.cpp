#include "txamp/econ.hpp"

#include <cmath>
#include <limits>

namespace txamp::econ {

PricingSchedule::PricingSchedule(std::vector<PriceTier> tiers) : tiers_(std::move(tiers)) {
  if (tiers_.empty()) throw parameter_error("pricing schedule needs at least one tier");
  double prev_bound = 0.0;
  for (std::size_t i = 0; i < tiers_.size(); ++i) {
    const auto& tier = tiers_[i];
    if (tier.usd_per_tb <= 0.0) throw parameter_error("tier prices must be positive");
    const bool last = (i + 1 == tiers_.size());
    if (last) {
      if (std::isfinite(tier.upper_bound_tb))
        throw parameter_error("final tier must be unbounded");
    } else {
      if (!std::isfinite(tier.upper_bound_tb) || tier.upper_bound_tb <= prev_bound)
        throw parameter_error("tier bounds must be strictly increasing");
      prev_bound = tier.upper_bound_tb;
    }
  }
}

PricingSchedule PricingSchedule::aws_default() {
  return PricingSchedule({{10.0, 90.0},
                          {50.0, 85.0},
                          {150.0, 70.0},
                          {std::numeric_limits<double>::infinity(), 50.0}});
}

PricingSchedule PricingSchedule::flat(double usd_per_tb) {
  return PricingSchedule({{std::numeric_limits<double>::infinity(), usd_per_tb}});
}

double PricingSchedule::cost(double traffic_tb) const {
  if (traffic_tb < 0.0) throw parameter_error("traffic must be nonnegative");
  double total = 0.0;
  double lower = 0.0;
  for (const auto& tier : tiers_) {
    const double upper = std::min(traffic_tb, tier.upper_bound_tb);
    if (upper <= lower) break;
    total += (upper - lower) * tier.usd_per_tb;
    lower = upper;
  }
  return total;
}

double PricingSchedule::average_price(double traffic_tb) const {
  if (traffic_tb < 0.0) throw parameter_error("traffic must be nonnegative");
  if (traffic_tb == 0.0) return tiers_.front().usd_per_tb;
  return cost(traffic_tb) / traffic_tb;
}

double PricingSchedule::marginal_price(double traffic_tb) const {
  if (traffic_tb < 0.0) throw parameter_error("traffic must be nonnegative");
  for (const auto& tier : tiers_)
    if (traffic_tb < tier.upper_bound_tb) return tier.usd_per_tb;
  return tiers_.back().usd_per_tb;
}

double outbound_cost(double traffic_tb, const PricingSchedule& schedule) {
  return schedule.cost(traffic_tb);
}

std::vector<EafPoint> eaf_curve(double taf, const std::vector<double>& traffic_grid_tb,
                                const PricingSchedule& schedule, double attacker_price_usd_per_tb,
                                double external_share, double internal_price_usd_per_tb) {
  if (attacker_price_usd_per_tb <= 0.0)
    throw parameter_error("attacker price must be positive");
  if (external_share < 0.0 || external_share > 1.0)
    throw parameter_error("external share must lie in [0,1]");
  std::vector<EafPoint> curve;
  curve.reserve(traffic_grid_tb.size());
  for (double t : traffic_grid_tb) {
    if (t < 0.0) throw parameter_error("traffic grid must be nonnegative");
    const double external_avg = schedule.average_price(external_share * t);
    const double victim_price =
        external_share * external_avg + (1.0 - external_share) * internal_price_usd_per_tb;
    curve.push_back({t, taf * victim_price / attacker_price_usd_per_tb});
  }
  return curve;
}

double LatencyValueModel::profit(double x_seconds) const {
  const auto& c = coefficients;
  return ((c[0] * x_seconds + c[1]) * x_seconds + c[2]) * x_seconds + c[3];
}

double LatencyValueModel::profit_rate(double x_seconds) const {
  const auto& c = coefficients;
  return (3.0 * c[0] * x_seconds + 2.0 * c[1]) * x_seconds + c[2];
}

double LatencyValueModel::argmax_profit_rate() const {
  const auto& c = coefficients;
  if (c[0] == 0.0) throw parameter_error("profit polynomial must be cubic");
  return -c[1] / (3.0 * c[0]);
}

LatencyProfit latency_profit(const LatencyValueModel& model, double x_seconds) {
  LatencyProfit out;
  out.pct_per_ms = model.profit_rate(x_seconds) / 1000.0;
  out.eth_per_ms = model.avg_bid_eth * out.pct_per_ms / 100.0;
  out.usd_per_ms = out.eth_per_ms * model.eth_usd;
  return out;
}

double monthly_benefit(const LatencyValueModel& model, double ms_saved) {
  if (ms_saved < 0.0) throw parameter_error("ms_saved must be nonnegative");
  const LatencyProfit best = latency_profit(model, model.argmax_profit_rate());
  return best.usd_per_ms * ms_saved * model.blocks_per_month;
}

}  // namespace txamp::econ
