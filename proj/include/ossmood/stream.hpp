#pragma once

// Incremental churn risk: per-contributor rolling lookback windows and
// running baselines, updated one scored message at a time.

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ossmood/churn.hpp"

namespace ossmood {

struct RiskAlert {
  std::string author;
  Timestamp t = 0;
  double P = 1;
  double N = -1;
  double baseline_P = 1;
  double baseline_N = -1;
  ActivityLabel label = ActivityLabel::ACT;
  std::optional<double> posterior_P;
  std::optional<double> posterior_N;

  friend bool operator==(const RiskAlert&, const RiskAlert&) = default;
};

inline nlohmann::ordered_json alert_to_json(const RiskAlert& a) {
  nlohmann::ordered_json j;
  j["author"] = a.author;
  j["t"] = a.t;
  j["P"] = a.P;
  j["N"] = a.N;
  j["P_bar"] = a.baseline_P;
  j["N_bar"] = a.baseline_N;
  j["predicted"] = to_string(a.label);
  j["posterior_P"] = a.posterior_P ? nlohmann::ordered_json(*a.posterior_P) : nlohmann::ordered_json(nullptr);
  j["posterior_N"] = a.posterior_N ? nlohmann::ordered_json(*a.posterior_N) : nlohmann::ordered_json(nullptr);
  return j;
}

struct AuthorState {
  struct Entry {
    Timestamp ts;
    int p;
    int n;
  };
  std::deque<Entry> window;
  std::int64_t window_p = 0, window_n = 0;
  std::int64_t total_p = 0, total_n = 0;
  std::uint64_t count = 0;
  Timestamp last = 0;
};

/// Emits one RiskAlert per scored, non-discarded message. Several messages
/// of one author at the same timestamp each emit; the last one reflects the
/// full window. Messages of one author must arrive in non-decreasing
/// timestamp order.
class StreamPredictor {
 public:
  explicit StreamPredictor(ChurnModel model) : model_(std::move(model)) {}

  const ChurnModel& model() const { return model_; }
  std::size_t authors() const { return state_.size(); }

  std::optional<RiskAlert> process(const Message& m) {
    if (!m.score) throw ContractViolation("stream: unscored message '" + m.id + "'");
    if (m.score->polarity == Polarity::discarded) return std::nullopt;
    auto it = state_.find(m.author);
    if (it == state_.end()) it = state_.emplace(m.author, AuthorState{}).first;
    auto& s = it->second;
    if (s.count > 0 && m.ts < s.last)
      throw ReorderError("stream: message '" + m.id + "' of '" + m.author + "' at " + std::to_string(m.ts) +
                         " precedes " + std::to_string(s.last));
    s.last = m.ts;
    s.window.push_back({m.ts, m.score->p, m.score->n});
    s.window_p += m.score->p;
    s.window_n += m.score->n;
    s.total_p += m.score->p;
    s.total_n += m.score->n;
    ++s.count;
    const Timestamp horizon = m.ts - static_cast<Timestamp>(model_.lookback_days) * kDay;
    while (s.window.front().ts < horizon) {
      s.window_p -= s.window.front().p;
      s.window_n -= s.window.front().n;
      s.window.pop_front();
    }
    const auto w = static_cast<double>(s.window.size());
    const auto c = static_cast<double>(s.count);
    FeatureVector f{{m.author, m.ts, 0, ActivityLabel::ACT},
                    static_cast<double>(s.window_p) / w,
                    static_cast<double>(s.window_n) / w,
                    static_cast<double>(s.total_p) / c,
                    static_cast<double>(s.total_n) / c};
    RiskAlert a{m.author, m.ts, f.P, f.N, *f.baseline_P, *f.baseline_N, predict_one(f, model_.mode, model_.theta),
                std::nullopt, std::nullopt};
    if (!model_.posterior.P.bins.empty()) a.posterior_P = posterior_lookup(model_.posterior.P, f.P);
    if (!model_.posterior.N.bins.empty()) a.posterior_N = posterior_lookup(model_.posterior.N, f.N);
    return a;
  }

  /// Processes a batch, partitioning authors over `jobs` threads. Alerts come
  /// back in input order.
  std::vector<RiskAlert> process_all(const std::vector<Message>& events, unsigned jobs = 1) {
    std::vector<std::optional<RiskAlert>> slots(events.size());
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
      for (std::size_t i = 0; i < events.size(); ++i) slots[i] = process(events[i]);
    } else {
      std::vector<std::vector<std::size_t>> parts(jobs);
      std::hash<std::string> h;
      for (std::size_t i = 0; i < events.size(); ++i) parts[h(events[i].author) % jobs].push_back(i);
      for (const auto& e : events) state_.try_emplace(e.author);  // no map insertion from workers
      std::vector<std::exception_ptr> errors(jobs);
      {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
          pool.emplace_back([&, j] {
            try {
              for (auto i : parts[j]) slots[i] = process(events[i]);
            } catch (...) {
              errors[j] = std::current_exception();
            }
          });
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    std::vector<RiskAlert> out;
    for (auto& s : slots)
      if (s) out.push_back(std::move(*s));
    return out;
  }

  nlohmann::ordered_json save_state() const {
    nlohmann::ordered_json j;
    j["lookback_days"] = model_.lookback_days;
    auto& authors = j["authors"];
    authors = nlohmann::ordered_json::object();
    for (const auto& [name, s] : state_) {
      if (s.count == 0) continue;
      nlohmann::ordered_json a;
      a["last"] = s.last;
      a["count"] = s.count;
      a["total_p"] = s.total_p;
      a["total_n"] = s.total_n;
      auto w = nlohmann::ordered_json::array();
      for (const auto& e : s.window) w.push_back({e.ts, e.p, e.n});
      a["window"] = std::move(w);
      authors[name] = std::move(a);
    }
    return j;
  }

  void restore_state(const nlohmann::json& j) {
    try {
      if (j.at("lookback_days").get<int>() != model_.lookback_days)
        throw ValidationError("stream state: lookback differs from the model's");
      std::map<std::string, AuthorState> fresh;
      for (const auto& [name, a] : j.at("authors").items()) {
        AuthorState s;
        s.last = a.at("last").get<Timestamp>();
        s.count = a.at("count").get<std::uint64_t>();
        s.total_p = a.at("total_p").get<std::int64_t>();
        s.total_n = a.at("total_n").get<std::int64_t>();
        for (const auto& e : a.at("window")) {
          s.window.push_back({e.at(0).get<Timestamp>(), e.at(1).get<int>(), e.at(2).get<int>()});
          s.window_p += s.window.back().p;
          s.window_n += s.window.back().n;
        }
        if (s.count == 0 || s.window.empty()) throw ValidationError("stream state: empty author '" + name + "'");
        fresh.emplace(name, std::move(s));
      }
      state_ = std::move(fresh);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("stream state: ") + e.what());
    }
  }

 private:
  ChurnModel model_;
  std::map<std::string, AuthorState> state_;
};

}  // namespace ossmood
