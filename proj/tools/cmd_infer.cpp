#include <string>

#include "commands.hpp"
#include "report_util.hpp"
#include "txamp/inference.hpp"
#include "txamp/model.hpp"

namespace txamp::cli {

int cmd_infer(const Config& cfg, const std::string& out_dir) {
  const auto dir = ensure_out_dir(out_dir);

  const auto messages = inference::read_message_log(cfg.get_string("infer.messages"));
  const auto events = inference::read_peer_events(cfg.get_string("infer.peers"));
  const auto allowlist = inference::read_allowlist(cfg.get_string("infer.allowlist"));

  inference::PipelineOptions options;
  options.error_threshold = cfg.get_double("infer.error_threshold", 10.0);
  options.min_messages = cfg.get_int("infer.min_messages", 1000);
  options.max_connections = static_cast<int>(cfg.get_int("infer.max_connections", 1000));

  const auto result = inference::run_estimation_pipeline(messages, events, allowlist, options);

  std::vector<std::vector<std::string>> estimate_rows;
  for (const auto& est : result.estimates) {
    estimate_rows.push_back({est.peer_id, fmt(est.theta_hat), fmt(est.x_hat),
                             fmt(est.ci_halfwidth), fmt(est.error_epsilon),
                             est.included ? "1" : "0"});
  }
  write_csv(dir / "estimates.csv", {"peer_id", "theta_hat", "x_hat", "ci", "epsilon", "included"},
            estimate_rows);

  std::vector<std::vector<std::string>> provenance_rows;
  for (const auto& prov : result.provenance) {
    provenance_rows.push_back({prov.peer_id, prov.software, prov.version, prov.commit_hash,
                               prov.is_public_commit ? "1" : "0", prov.status});
  }
  write_csv(dir / "provenance.csv",
            {"peer_id", "software", "version", "commit_hash", "public_commit", "status"},
            provenance_rows);

  // density table at unit steps; a point-mass fallback puts its whole mass
  // into one grid cell
  std::vector<std::vector<std::string>> density_rows;
  const auto& g = result.distribution;
  if (g.kind() == model::ConnectionDistribution::Kind::Smoothed) {
    for (std::size_t i = 0; i < g.density().size(); ++i) {
      const double x = g.origin() + g.step() * static_cast<double>(i);
      density_rows.push_back({fmt(x), fmt(g.density()[i])});
    }
  } else if (!result.included_x_hats.empty()) {
    const int max_conn = options.max_connections;
    for (int x = 0; x <= max_conn; ++x)
      density_rows.push_back(
          {fmt(x), fmt(x == static_cast<int>(g.point() + 0.5) ? 1.0 : 0.0)});
  }
  write_csv(dir / "density.csv", {"x", "g_x"}, density_rows);

  OrderedJson summary;
  summary["peers_seen"] = result.provenance.size();
  summary["peers_estimated"] = result.estimates.size();
  summary["peers_included"] = result.included_x_hats.size();
  if (!result.included_x_hats.empty()) {
    double mean = 0.0;
    for (double x : result.included_x_hats) mean += x;
    mean /= static_cast<double>(result.included_x_hats.size());
    std::vector<double> sorted = result.included_x_hats;
    std::sort(sorted.begin(), sorted.end());
    summary["x_hat_mean"] = sig(mean);
    summary["x_hat_median"] = sig(sorted[sorted.size() / 2]);
    summary["distribution_mean"] = sig(result.distribution.mean());
  }
  write_json(dir / "infer_summary.json", summary);
  return 0;
}

}  // namespace txamp::cli
