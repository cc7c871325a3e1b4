// Timing comparison between the serial reference kernels and the OpenMP
// variants. Not part of the test suite; build and run by hand.

#include <chrono>
#include <cstdio>
#include <string>

#include "conseq/filters.hpp"
#include "conseq/natext.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace conseq;

namespace {

template <typename F>
double time_s(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const std::string& name, double serial, double parallel) {
  std::printf("%-34s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name.c_str(), serial,
              parallel, parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run the serial path\n");
#endif

  {
    // saturation closure of every subset of a 16-formula universe
    auto l = parse_presentation(
        "sig c0:0 c1:0 c2:0 c3:0 c4:0 c5:0 c6:0 c7:0 c8:0 c9:0 c10:0 c11:0 c12:0 c13:0 c14:0\n"
        "vars x\n"
        "rule c0, c1 => c2\n"
        "rule c2, c3 => c4\n"
        "rule c4, c5 => c6\n"
        "rule c6, c7 => c8\n"
        "rule x, c8 => c9\n"
        "rule c9, c10 => c11\n");
    auto u = make_universe(l);
    RelationTable a, b;
    double ts = time_s([&] { a = closure_table(l, u, Exec::serial); });
    double tp = time_s([&] { b = closure_table(l, u, Exec::parallel); });
    row("closure_table (2^16 subsets)", ts, tp);
    if (!(a == b)) std::printf("  MISMATCH\n");
  }

  {
    // filter lattice of a 16-element structure
    auto l = parse_presentation("sig a:0 b:0\nvars x\nrule x, a => b\n");
    std::vector<std::string> labels;
    for (int i = 0; i < 16; ++i) labels.push_back("e" + std::to_string(i));
    FiniteStructure s("M", l.sig, labels);
    s.define(0, {}, 0);
    s.define(1, {}, 1);
    FilterLattice a, b;
    double ts = time_s([&] { a = all_filters(l, s, Exec::serial); });
    double tp = time_s([&] { b = all_filters(l, s, Exec::parallel); });
    row("all_filters (2^16 subsets)", ts, tp);
    if (a.filters != b.filters) std::printf("  MISMATCH\n");
  }

  {
    std::vector<std::uint64_t> a, b;
    double ts = time_s([&] { a = moore_families(5, Exec::serial); });
    double tp = time_s([&] { b = moore_families(5, Exec::parallel); });
    row("moore_families (size 5)", ts, tp);
    if (a != b) std::printf("  MISMATCH\n");
  }

  {
    ExtensionProblem p(preset_staged_union(), {"y1"});
    RelationTable a, b;
    double ts = time_s([&] { a = plus_table(p, Exec::serial); });
    double tp = time_s([&] { b = plus_table(p, Exec::parallel); });
    row("plus_table (staged union + y1)", ts, tp);
    if (!(a == b)) std::printf("  MISMATCH\n");
  }

  {
    ExtensionProblem p(preset_axiom_mix(), {"y1"});
    std::size_t na = 0, nb = 0;
    double ts = time_s([&] { na = enumerate_natural_extensions(p, Exec::serial).extensions.size(); });
    double tp =
        time_s([&] { nb = enumerate_natural_extensions(p, Exec::parallel).extensions.size(); });
    row("natural extensions (5-formula Fm)", ts, tp);
    if (na != nb) std::printf("  MISMATCH\n");
  }

  return 0;
}
