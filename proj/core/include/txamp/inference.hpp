#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "txamp/errors.hpp"
#include "txamp/model.hpp"

namespace txamp::inference {

struct MessageCounts {
  std::string peer_id;
  std::int64_t broadcasts = 0;  // full-transaction messages (0x02)
  std::int64_t announces = 0;   // hash-only messages (0x08)

  std::int64_t total() const { return broadcasts + announces; }
};

struct PeerEstimate {
  std::string peer_id;
  double theta_hat = 0.0;      // broadcast fraction, in (0, 1]
  double x_hat = 0.0;          // reconstructed connection count, (1/theta)^2
  double ci_halfwidth = 0.0;   // 1/sqrt(m)
  double error_epsilon = 0.0;  // deviation bound used by the exclusion rule
  std::int64_t broadcasts = 0;
  std::int64_t messages = 0;
  bool included = false;
};

// m2 / (m2 + m8). Empty when the peer never broadcasts (no estimate exists,
// which is distinct from theta = 0). Throws when no messages were seen.
std::optional<double> estimate_theta(const MessageCounts& counts);

// (1 / theta)^2.
double reconstruct_peers(double theta_hat);

// x_hat - (1/sqrt(x_hat) + 1/sqrt(m))^-2: how far the estimate moves when
// theta shifts by its two-sigma bound. Decreasing in m, increasing in x_hat.
double estimate_error(double x_hat, std::int64_t messages);

// Full estimate from raw counts; empty on the no-broadcast case.
std::optional<PeerEstimate> make_estimate(const MessageCounts& counts);

// Keeps estimates with error <= threshold and m >= min_messages, setting the
// included flag on every element. Order preserved.
std::vector<PeerEstimate> filter_estimates(std::vector<PeerEstimate> estimates,
                                           double error_threshold = 10.0,
                                           std::int64_t min_messages = 1000);

// Averages x_hat across monitors that saw the same peer; message counts are
// unioned and theta/ci/error recomputed from the merged values.
PeerEstimate merge_monitor_views(const std::map<std::string, PeerEstimate>& per_monitor);

// Gaussian KDE with the Scott bandwidth n^(-1/5) * sample std, tabulated at
// unit steps and renormalized on [0, max_connections]. Degenerate samples
// (single value) collapse to a point mass.
model::ConnectionDistribution build_distribution(const std::vector<double>& x_hats,
                                                 int max_connections = 1000);

struct ClientIdentity {
  std::string raw_name;
  std::string software;
  std::string version;
  std::string commit_hash;  // first 4 bytes, 8 hex chars
  bool parseable = false;
  bool is_public_commit = false;
};

// Parses the slash-and-dash node-name convention, e.g.
// "Geth/v1.13.4-stable-3f907d6a/linux-amd64/go1.21.3". Never throws;
// non-conforming names come back with parseable = false.
ClientIdentity parse_client_identity(const std::string& node_name,
                                     const std::set<std::string>& allowlist);

// --- batch pipeline ------------------------------------------------------

struct MessageLogRecord {
  std::int64_t timestamp_ms = 0;
  std::string monitor_id;
  std::string peer_id;
  int msg_type = 2;  // 2 or 8
  std::string tx_hash;
  std::int64_t tx_size_bytes = 0;
};

struct PeerEventRecord {
  std::string peer_id;
  std::string node_name;
  bool added = true;
  std::int64_t timestamp_ms = 0;
};

struct PipelineOptions {
  double error_threshold = 10.0;
  std::int64_t min_messages = 1000;
  int max_connections = 1000;
  // Erigon stopped square-root propagation at this version; later peers are
  // not estimable and are excluded.
  int erigon_sqrt_max_major = 2;
  int erigon_sqrt_max_minor = 49;
};

struct PeerProvenance {
  std::string peer_id;
  std::string node_name;
  std::string software;
  std::string version;
  std::string commit_hash;
  bool is_public_commit = false;
  std::string status;  // "included" or "excluded:<reason>"
};

struct PipelineResult {
  std::vector<PeerEstimate> estimates;  // all estimable peers, flags set
  std::vector<PeerProvenance> provenance;
  model::ConnectionDistribution distribution = model::ConnectionDistribution::point_mass(0);
  std::vector<double> included_x_hats;
};

// Message counts -> per-monitor estimates -> merged per-peer estimates ->
// exclusion rules (client gate, no-broadcast, error, message floor) ->
// smoothed connection distribution.
PipelineResult run_estimation_pipeline(const std::vector<MessageLogRecord>& messages,
                                       const std::vector<PeerEventRecord>& peer_events,
                                       const std::set<std::string>& allowlist,
                                       const PipelineOptions& options = {});

// io helpers for the pipeline's record formats
std::vector<MessageLogRecord> read_message_log(const std::string& path);
std::vector<PeerEventRecord> read_peer_events(const std::string& path);
std::set<std::string> read_allowlist(const std::string& path);

}  // namespace txamp::inference
