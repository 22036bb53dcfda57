// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>

#include "contact_spectral/verify.hpp"

int main() {
  using namespace contact_spectral;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> results = run_acceptance_suite();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s criterion %-26s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.seconds, r.detail.c_str());
    all = all && r.pass;
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s acceptance suite, %zu criteria, %.2fs total\n", all ? "PASS" : "FAIL",
              results.size(), total);
  return all ? 0 : 1;
}
