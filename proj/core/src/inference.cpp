#include "txamp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "txamp/io.hpp"

namespace txamp::inference {

std::optional<double> estimate_theta(const MessageCounts& counts) {
  if (counts.broadcasts < 0 || counts.announces < 0)
    throw parameter_error("message counts must be nonnegative");
  if (counts.total() < 1) throw parameter_error("estimate needs at least one message");
  if (counts.broadcasts == 0) return std::nullopt;  // never broadcasts: no estimate
  return static_cast<double>(counts.broadcasts) / static_cast<double>(counts.total());
}

double reconstruct_peers(double theta_hat) {
  if (!(theta_hat > 0.0) || theta_hat > 1.0)
    throw parameter_error("theta_hat must lie in (0, 1]");
  return 1.0 / (theta_hat * theta_hat);
}

double estimate_error(double x_hat, std::int64_t messages) {
  if (x_hat < 1.0) throw parameter_error("x_hat must be at least 1");
  if (messages < 1) throw parameter_error("messages must be at least 1");
  const double shifted = 1.0 / std::sqrt(x_hat) + 1.0 / std::sqrt(static_cast<double>(messages));
  return x_hat - 1.0 / (shifted * shifted);
}

std::optional<PeerEstimate> make_estimate(const MessageCounts& counts) {
  const auto theta = estimate_theta(counts);
  if (!theta) return std::nullopt;
  PeerEstimate est;
  est.peer_id = counts.peer_id;
  est.theta_hat = *theta;
  est.x_hat = reconstruct_peers(*theta);
  est.ci_halfwidth = 1.0 / std::sqrt(static_cast<double>(counts.total()));
  est.error_epsilon = estimate_error(est.x_hat, counts.total());
  est.broadcasts = counts.broadcasts;
  est.messages = counts.total();
  return est;
}

std::vector<PeerEstimate> filter_estimates(std::vector<PeerEstimate> estimates,
                                           double error_threshold, std::int64_t min_messages) {
  if (error_threshold <= 0.0) throw parameter_error("error threshold must be positive");
  std::vector<PeerEstimate> kept;
  kept.reserve(estimates.size());
  for (auto& est : estimates) {
    est.included = est.broadcasts > 0 && est.error_epsilon <= error_threshold &&
                   est.messages >= min_messages;
    if (est.included) kept.push_back(est);
  }
  return kept;
}

PeerEstimate merge_monitor_views(const std::map<std::string, PeerEstimate>& per_monitor) {
  if (per_monitor.empty()) throw parameter_error("merge needs at least one monitor view");
  const std::string& peer_id = per_monitor.begin()->second.peer_id;
  double x_sum = 0.0;
  std::int64_t broadcasts = 0;
  std::int64_t messages = 0;
  for (const auto& [monitor, est] : per_monitor) {
    if (est.peer_id != peer_id)
      throw parameter_error("conflicting peer ids in monitor views: '" + peer_id + "' vs '" +
                            est.peer_id + "'");
    x_sum += est.x_hat;
    broadcasts += est.broadcasts;
    messages += est.messages;
  }
  PeerEstimate merged;
  merged.peer_id = peer_id;
  merged.x_hat = x_sum / static_cast<double>(per_monitor.size());
  merged.theta_hat = 1.0 / std::sqrt(merged.x_hat);
  merged.broadcasts = broadcasts;
  merged.messages = messages;
  merged.ci_halfwidth = 1.0 / std::sqrt(static_cast<double>(messages));
  merged.error_epsilon = estimate_error(std::max(merged.x_hat, 1.0), messages);
  return merged;
}

model::ConnectionDistribution build_distribution(const std::vector<double>& x_hats,
                                                 int max_connections) {
  if (x_hats.empty()) throw parameter_error("distribution needs at least one sample");
  if (max_connections < 1) throw parameter_error("max_connections must be at least 1");

  const double n = static_cast<double>(x_hats.size());
  const double mean = std::accumulate(x_hats.begin(), x_hats.end(), 0.0) / n;
  double var = 0.0;
  for (double x : x_hats) var += (x - mean) * (x - mean);
  var = x_hats.size() > 1 ? var / (n - 1.0) : 0.0;
  const double bandwidth = std::sqrt(var) * std::pow(n, -0.2);

  if (bandwidth <= 0.0) {
    // All samples identical: the kernel degenerates, fall back to the exact
    // point mass.
    return model::ConnectionDistribution::point_mass(mean);
  }

  const int grid_points = max_connections + 1;  // unit steps over [0, max]
  std::vector<double> density(static_cast<std::size_t>(grid_points), 0.0);
  const double norm = 1.0 / (n * bandwidth * std::sqrt(2.0 * M_PI));
  for (int i = 0; i < grid_points; ++i) {
    const double x = static_cast<double>(i);
    double sum = 0.0;
    for (double sample : x_hats) {
      const double z = (x - sample) / bandwidth;
      sum += std::exp(-0.5 * z * z);
    }
    density[static_cast<std::size_t>(i)] = norm * sum;
  }

  // Mass outside [0, max_connections] is dropped; renormalize the table.
  double mass = 0.0;
  for (int i = 0; i + 1 < grid_points; ++i)
    mass += 0.5 * (density[static_cast<std::size_t>(i)] + density[static_cast<std::size_t>(i) + 1]);
  if (mass <= 0.0) throw parameter_error("kde produced an empty density");
  for (double& v : density) v /= mass;

  return model::ConnectionDistribution::smoothed(std::move(density), 1.0, 0.0);
}

namespace {

bool is_hex(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isxdigit(static_cast<unsigned char>(c)) == 0) return false;
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

ClientIdentity parse_client_identity(const std::string& node_name,
                                     const std::set<std::string>& allowlist) {
  ClientIdentity id;
  id.raw_name = node_name;
  const std::vector<std::string> slash = split(node_name, '/');
  if (slash.size() < 2 || slash[0].empty()) return id;
  // "<version>-<branch>-<commit8>"; the commit is the trailing hex run.
  const std::vector<std::string> dash = split(slash[1], '-');
  if (dash.size() < 2) return id;
  const std::string commit = to_lower(dash.back());
  if (commit.size() != 8 || !is_hex(commit)) return id;
  id.software = slash[0];
  id.version = dash[0];
  id.commit_hash = commit;
  id.parseable = !id.version.empty();
  id.is_public_commit = allowlist.count(commit) != 0;
  return id;
}

namespace {

// "v2.49.0" -> {2, 49}; false when the shape is unrecognizable.
bool parse_major_minor(const std::string& version, int& major, int& minor) {
  std::string v = version;
  if (!v.empty() && (v[0] == 'v' || v[0] == 'V')) v = v.substr(1);
  const std::vector<std::string> parts = split(v, '.');
  if (parts.size() < 2) return false;
  try {
    major = std::stoi(parts[0]);
    minor = std::stoi(parts[1]);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

PipelineResult run_estimation_pipeline(const std::vector<MessageLogRecord>& messages,
                                       const std::vector<PeerEventRecord>& peer_events,
                                       const std::set<std::string>& allowlist,
                                       const PipelineOptions& options) {
  // Latest known node name per peer.
  std::map<std::string, std::string> names;
  for (const auto& ev : peer_events)
    if (ev.added && !ev.node_name.empty()) names[ev.peer_id] = ev.node_name;

  // (peer, monitor) -> counts.
  std::map<std::string, std::map<std::string, MessageCounts>> per_peer;
  for (const auto& rec : messages) {
    MessageCounts& counts = per_peer[rec.peer_id][rec.monitor_id];
    counts.peer_id = rec.peer_id;
    if (rec.msg_type == 2) {
      ++counts.broadcasts;
    } else if (rec.msg_type == 8) {
      ++counts.announces;
    } else {
      throw parameter_error("unsupported message type " + std::to_string(rec.msg_type));
    }
  }

  PipelineResult result;
  std::vector<PeerEstimate> candidates;
  for (const auto& [peer_id, monitors] : per_peer) {
    PeerProvenance prov;
    prov.peer_id = peer_id;
    const auto name_it = names.find(peer_id);
    if (name_it == names.end()) {
      prov.status = "excluded:no-client-metadata";
      result.provenance.push_back(std::move(prov));
      continue;
    }
    prov.node_name = name_it->second;
    const ClientIdentity ident = parse_client_identity(name_it->second, allowlist);
    prov.software = ident.software;
    prov.version = ident.version;
    prov.commit_hash = ident.commit_hash;
    prov.is_public_commit = ident.is_public_commit;
    if (!ident.parseable) {
      prov.status = "excluded:unparseable-name";
      result.provenance.push_back(std::move(prov));
      continue;
    }
    if (!ident.is_public_commit) {
      prov.status = "excluded:customized-client";
      result.provenance.push_back(std::move(prov));
      continue;
    }
    const std::string software = to_lower(ident.software);
    if (software == "erigon") {
      int major = 0, minor = 0;
      const bool ok = parse_major_minor(ident.version, major, minor);
      if (!ok || major > options.erigon_sqrt_max_major ||
          (major == options.erigon_sqrt_max_major && minor > options.erigon_sqrt_max_minor)) {
        prov.status = "excluded:non-sqrt-policy";
        result.provenance.push_back(std::move(prov));
        continue;
      }
    } else if (software != "geth") {
      prov.status = "excluded:unsupported-client";
      result.provenance.push_back(std::move(prov));
      continue;
    }

    std::map<std::string, PeerEstimate> views;
    for (const auto& [monitor, counts] : monitors) {
      if (auto est = make_estimate(counts)) views[monitor] = *est;
    }
    if (views.empty()) {
      prov.status = "excluded:no-broadcast";
      result.provenance.push_back(std::move(prov));
      continue;
    }
    PeerEstimate merged = merge_monitor_views(views);
    merged.included = merged.error_epsilon <= options.error_threshold &&
                      merged.messages >= options.min_messages;
    prov.status = merged.included
                      ? "included"
                      : (merged.messages < options.min_messages ? "excluded:too-few-messages"
                                                                : "excluded:error-above-threshold");
    result.provenance.push_back(std::move(prov));
    candidates.push_back(std::move(merged));
  }

  result.estimates = std::move(candidates);
  for (const auto& est : result.estimates)
    if (est.included) result.included_x_hats.push_back(est.x_hat);
  if (!result.included_x_hats.empty())
    result.distribution = build_distribution(result.included_x_hats, options.max_connections);
  return result;
}

std::vector<MessageLogRecord> read_message_log(const std::string& path) {
  std::vector<MessageLogRecord> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 6)
      throw parse_error(path, line, "expected 6 message-log fields, got " +
                                        std::to_string(fields.size()));
    MessageLogRecord rec;
    rec.timestamp_ms = io::parse_int(fields[0], path, line);
    rec.monitor_id = fields[1];
    rec.peer_id = fields[2];
    if (fields[3] == "02" || fields[3] == "2") {
      rec.msg_type = 2;
    } else if (fields[3] == "08" || fields[3] == "8") {
      rec.msg_type = 8;
    } else {
      throw parse_error(path, line, "message type must be 02 or 08, got '" + fields[3] + "'");
    }
    rec.tx_hash = fields[4];
    rec.tx_size_bytes = io::parse_int(fields[5], path, line);
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<PeerEventRecord> read_peer_events(const std::string& path) {
  std::vector<PeerEventRecord> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 4)
      throw parse_error(path, line, "expected 4 peer-event fields, got " +
                                        std::to_string(fields.size()));
    PeerEventRecord rec;
    rec.peer_id = fields[0];
    rec.node_name = fields[1];
    if (fields[2] == "add") {
      rec.added = true;
    } else if (fields[2] == "drop") {
      rec.added = false;
    } else {
      throw parse_error(path, line, "event must be add or drop, got '" + fields[2] + "'");
    }
    rec.timestamp_ms = io::parse_int(fields[3], path, line);
    out.push_back(std::move(rec));
  });
  return out;
}

std::set<std::string> read_allowlist(const std::string& path) {
  std::set<std::string> out;
  io::for_each_csv_row(path, [&](std::size_t line, const std::vector<std::string>& fields) {
    if (fields.size() != 1 || fields[0].empty())
      throw parse_error(path, line, "expected one commit hash per line");
    std::string hash = fields[0];
    std::transform(hash.begin(), hash.end(), hash.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!is_hex(hash))
      throw parse_error(path, line, "commit hash must be hex, got '" + fields[0] + "'");
    out.insert(hash);
  });
  return out;
}

}  // namespace txamp::inference
