#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ossmood/bugzilla.hpp"

using namespace ossmood;
using Clock = std::chrono::steady_clock;

namespace {

// Instant local Bugzilla REST mock. `status_for` decides the HTTP status per
// (bug, attempt); 200 responses carry one comment per bug.
class MockBugzilla {
 public:
  using StatusFn = std::function<int(int bug, int attempt)>;

  explicit MockBugzilla(StatusFn status_for = [](int, int) { return 200; }) : status_for_(std::move(status_for)) {
    server_.Get(R"(/bugzilla/rest/bug/(\d+)/comment)", [this](const httplib::Request& req, httplib::Response& res) {
      const int bug = std::stoi(req.matches[1]);
      int attempt;
      {
        std::lock_guard lock(mu_);
        attempt = attempts_[bug]++;
        arrivals_.push_back(Clock::now());
      }
      res.status = status_for_(bug, attempt);
      if (res.status != 200) return;
      nlohmann::json body;
      const auto id = std::to_string(bug);
      body["bugs"][id]["comments"] = nlohmann::json::array(
          {{{"id", bug * 10}, {"bug_id", bug}, {"creator", "dev" + id + "@example.org"},
            {"creation_time", "2005-01-0" + id + "T12:00:00Z"}, {"text", "comment on " + id}}});
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockBugzilla() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/bugzilla/"; }

  int attempts(int bug) {
    std::lock_guard lock(mu_);
    return attempts_[bug];
  }

  std::vector<Clock::time_point> arrivals() {
    std::lock_guard lock(mu_);
    return arrivals_;
  }

 private:
  StatusFn status_for_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::map<int, int> attempts_;
  std::vector<Clock::time_point> arrivals_;
};

FetchOptions fast() {
  FetchOptions o;
  o.requests_per_second = 200;
  o.retry_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(2000);
  return o;
}

}  // namespace

TEST(Fetch, ThreeBugsRoundTrip) {
  MockBugzilla mock;
  const auto r = fetch_bugzilla(mock.base_url(), 1, 3, fast());
  EXPECT_TRUE(r.errors.empty());
  ASSERT_EQ(r.export_doc["bugs"].size(), 3u);
  std::istringstream in(r.export_doc.dump());
  const auto parsed = parse_bugzilla_export(in, BugzillaFormat::json);
  ASSERT_EQ(parsed.messages.size(), 3u);
  EXPECT_EQ(parsed.messages[0].discussion, "1");
  EXPECT_EQ(parsed.messages[2].author, "dev3@example.org");
}

TEST(Fetch, NotFoundIsPermanentAndNamesBug) {
  MockBugzilla mock([](int bug, int) { return bug == 2 ? 404 : 200; });
  const auto r = fetch_bugzilla(mock.base_url(), 1, 3, fast());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].record, "bug 2");
  EXPECT_NE(r.errors[0].reason.find("404"), std::string::npos);
  EXPECT_EQ(mock.attempts(2), 1);
  EXPECT_TRUE(r.export_doc["bugs"].contains("1"));
  EXPECT_TRUE(r.export_doc["bugs"].contains("3"));
  EXPECT_FALSE(r.export_doc["bugs"].contains("2"));
}

TEST(Fetch, ServerErrorsAreRetried) {
  MockBugzilla mock([](int bug, int attempt) { return bug == 1 && attempt < 2 ? 503 : 200; });
  const auto r = fetch_bugzilla(mock.base_url(), 1, 1, fast());
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(mock.attempts(1), 3);
}

TEST(Fetch, RetriesAreCapped) {
  MockBugzilla mock([](int, int) { return 500; });
  auto opt = fast();
  opt.max_retries = 2;
  const auto r = fetch_bugzilla(mock.base_url(), 7, 7, opt);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].record, "bug 7");
  EXPECT_EQ(mock.attempts(7), 3);
}

TEST(Fetch, UnreachableServerIsTransportError) {
  auto opt = fast();
  opt.max_retries = 1;
  opt.timeout = std::chrono::milliseconds(300);
  const auto r = fetch_bugzilla("http://127.0.0.1:1", 1, 1, opt);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].reason.find("transport"), std::string::npos);
}

TEST(Fetch, RateLimitBoundsWallTime) {
  MockBugzilla mock;
  FetchOptions opt;
  opt.requests_per_second = 2;
  const auto start = Clock::now();
  const auto r = fetch_bugzilla(mock.base_url(), 1, 10, opt);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  EXPECT_TRUE(r.errors.empty());
  // Ten starts spaced 0.5 s apart span at least 4.5 s.
  EXPECT_GE(elapsed, 4.5);
  const auto arrivals = mock.arrivals();
  ASSERT_EQ(arrivals.size(), 10u);
  for (std::size_t i = 1; i < arrivals.size(); ++i)
    EXPECT_GE(std::chrono::duration<double>(arrivals[i] - arrivals[i - 1]).count(), 0.45);
}

TEST(Fetch, RejectsBadArguments) {
  EXPECT_THROW(fetch_bugzilla("http://127.0.0.1:1", 3, 1), ContractViolation);
  EXPECT_THROW(fetch_bugzilla("no-scheme", 1, 1), ContractViolation);
  EXPECT_THROW(RateLimiter(0), ContractViolation);
}
