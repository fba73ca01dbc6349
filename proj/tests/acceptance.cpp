#include <sfocus/acceptance.hpp>

#include <cstdio>
#include <string>

using namespace sfocus::acceptance;

namespace {
void print(const CriterionResult& r) {
  std::printf("criterion %2d %s  %s (%.1f s)\n", r.id, r.passed() ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
  for (const auto& c : r.checks) {
    const char* mark = c.relation == "info" ? "    " : (c.pass ? "[ok]" : "[!!]");
    if (c.relation == "info" || c.relation == "==")
      std::printf("    %s %s = %.10g\n", mark, c.name.c_str(), c.value);
    else if (c.relation == "|-target|<=")
      std::printf("    %s %s = %.10g (target %.10g, tolerance %.3g)\n", mark, c.name.c_str(), c.value, c.target,
                  c.tolerance);
    else
      std::printf("    %s %s = %.10g (%s %.3g)\n", mark, c.name.c_str(), c.value, c.relation.c_str(), c.tolerance);
  }
  if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
  std::fflush(stdout);
}
} // namespace

// acceptance [selector]: runs every criterion, or those matching a number, key or suite.
int main(int argc, char** argv) {
  const std::string sel = argc > 1 ? argv[1] : "all";
  const auto chosen = select(sel);
  if (chosen.empty()) {
    std::fprintf(stderr, "unknown selector '%s'\n", sel.c_str());
    return 2;
  }
  bool ok = true;
  for (const auto* c : chosen) {
    const auto r = run(*c);
    print(r);
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}
