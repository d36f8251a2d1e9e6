#pragma once

#include <array>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp::econ {

struct PriceTier {
  double upper_bound_tb;  // cumulative upper bound; infinity for the last tier
  double usd_per_tb;
};

// Tiered pay-as-you-go egress pricing. Bounds must be strictly increasing and
// prices positive; the final tier is unbounded.
class PricingSchedule {
 public:
  explicit PricingSchedule(std::vector<PriceTier> tiers);

  // 90 USD/TB to 10 TB, 85 to 50 TB, 70 to 150 TB, 50 beyond.
  static PricingSchedule aws_default();
  static PricingSchedule flat(double usd_per_tb);

  // Piecewise-linear cost of `traffic_tb` of egress. Continuous and
  // nondecreasing.
  double cost(double traffic_tb) const;
  // cost/traffic; the first-tier marginal price at zero traffic.
  double average_price(double traffic_tb) const;
  double marginal_price(double traffic_tb) const;

  const std::vector<PriceTier>& tiers() const { return tiers_; }

 private:
  std::vector<PriceTier> tiers_;
};

double outbound_cost(double traffic_tb, const PricingSchedule& schedule);

struct EafPoint {
  double traffic_tb;
  double eaf;
};

// EAF as a function of a modified node's monthly traffic. The victim's
// blended price mixes the tiered external rate (averaged over the external
// share of the traffic) with the flat intra-cloud rate.
std::vector<EafPoint> eaf_curve(double taf, const std::vector<double>& traffic_grid_tb,
                                const PricingSchedule& schedule, double attacker_price_usd_per_tb,
                                double external_share, double internal_price_usd_per_tb);

// Relative block-bid profit P(x) over the slot time x (seconds), and the
// conversion of its slope into per-millisecond earnings.
struct LatencyValueModel {
  // c3*x^3 + c2*x^2 + c1*x + c0
  std::array<double, 4> coefficients{-1.99, 2.44, 32.5, 40.77};
  double avg_bid_eth = 0.06;
  double eth_usd = 2500.0;
  double blocks_per_month = 216000.0;  // 12 s slots over 30 days

  double profit(double x_seconds) const;
  double profit_rate(double x_seconds) const;  // P'(x)
  // Root of P''(x): the submission time with the steepest profit growth.
  double argmax_profit_rate() const;
};

struct LatencyProfit {
  double pct_per_ms;  // percent profit increase per millisecond saved
  double eth_per_ms;
  double usd_per_ms;
};

LatencyProfit latency_profit(const LatencyValueModel& model, double x_seconds);

// USD per month gained by shaving `ms_saved` milliseconds at the optimal
// submission time.
double monthly_benefit(const LatencyValueModel& model, double ms_saved);

}  // namespace txamp::econ
