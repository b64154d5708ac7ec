// Compares the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>

#include "goodie/graph.hpp"
#include "goodie/rng.hpp"
#include "goodie/synthetic.hpp"

using namespace goodie;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    SyntheticSpec spec;
    spec.n_nodes = 4000;
    spec.n_classes = 8;
    spec.intra_p = 0.01;
    spec.inter_p = 0.001;
    spec.feature_dim = 64;
    spec.seed = 42;
    SyntheticData data = generate_synthetic(spec);
    NormalizedAdjacency adj = normalize_sym(data.graph);

    Rng rng(7);
    Matrix dense(spec.n_nodes, 64);
    for (double& v : dense.data) v = rng.normal();

    Matrix a(512, 512), b(512, 512);
    for (double& v : a.data) v = rng.normal();
    for (double& v : b.data) v = rng.normal();

    const int reps = 20;
    double spmm_par = time_ms([&] { spmm(adj, dense); }, reps);
    double spmm_ser = time_ms([&] { spmm_serial(adj, dense); }, reps);
    double mm_par = time_ms([&] { matmul_dense(a, b); }, reps);
    double mm_ser = time_ms([&] { matmul_dense_serial(a, b); }, reps);

    double diff_spmm = max_abs_diff(spmm(adj, dense), spmm_serial(adj, dense));
    double diff_mm = max_abs_diff(matmul_dense(a, b), matmul_dense_serial(a, b));

    std::printf("spmm   %zu nodes x %zu cols: omp %.3f ms, serial %.3f ms, speedup %.2fx, maxdiff %.2e\n",
                spec.n_nodes, dense.cols, spmm_par, spmm_ser, spmm_ser / spmm_par, diff_spmm);
    std::printf("matmul 512x512x512:           omp %.3f ms, serial %.3f ms, speedup %.2fx, maxdiff %.2e\n",
                mm_par, mm_ser, mm_ser / mm_par, diff_mm);
    return 0;
}
