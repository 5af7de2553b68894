// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <cstdio>

#include <symop/selftest.hpp>

int main() {
  symop::selftest::Suite suite;
  int failed = 0;
  for (const auto& r : suite.run_all()) {
    std::printf("%s C%d %s: %s [%.2f s, budget %.0f s]\n", r.passed() ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.detail.c_str(), r.seconds, r.budget);
    if (!r.passed()) ++failed;
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
