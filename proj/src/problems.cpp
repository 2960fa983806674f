#include "fls/problems.hpp"

#include "fls/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fls {

namespace {

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::vector<double> data(rows * cols);
    for (double& v : data) v = rng.normal();
    return DenseMatrix(rows, cols, std::move(data));
}

} // namespace

Vector make_rhs(const DenseMatrix& A, const DenseMatrix& B, std::span<const double> x_star, bool consistent,
                Rng& rng) {
    Vector b = matvec(A, matvec(B, x_star));
    if (consistent) return b;

    const std::size_t m = A.rows();
    const std::size_t l = A.cols();
    if (m > kInconsistentRowCeiling)
        throw std::invalid_argument("inconsistent right-hand side needs the full Q of A; m = " + std::to_string(m) +
                                    " exceeds the ceiling of " + std::to_string(kInconsistentRowCeiling) +
                                    " (use desk scale)");
    if (m == l) throw std::invalid_argument("inconsistent right-hand side needs m > l (null(A^T) is trivial)");

    const DenseMatrix N = null_space_of_transpose(A);
    Vector v(m - l);
    for (double& t : v) t = rng.normal();
    Vector nv = matvec(N, v);
    const double scale = norm2(b) / norm2(nv);
    axpy(scale, nv, b);
    return b;
}

FactorizedProblem gen_gaussian(const GaussianSpec& spec, Rng& rng) {
    if (spec.l == 0 || spec.l > std::min(spec.m, spec.n))
        throw std::invalid_argument("gen_gaussian: need 1 <= l <= min(m, n)");
    if (spec.s < 1 || spec.s > spec.n) throw std::invalid_argument("gen_gaussian: need 1 <= s <= n");

    const std::uint64_t seed = rng.seed();
    DenseMatrix A = gaussian_matrix(spec.m, spec.l, rng);
    DenseMatrix B = gaussian_matrix(spec.l, spec.n, rng);

    // uniform s-subset by partial Fisher-Yates
    std::vector<std::size_t> idx(spec.n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < spec.s; ++i) std::swap(idx[i], idx[i + rng.below(spec.n - i)]);
    Vector x_star(spec.n, 0.0);
    for (std::size_t i = 0; i < spec.s; ++i) {
        double v = rng.normal();
        while (v == 0.0) v = rng.normal();
        x_star[idx[i]] = v;
    }

    Vector b = make_rhs(A, B, x_star, spec.consistent, rng);
    ProblemMeta meta{spec.s, seed, "gaussian"};
    return FactorizedProblem(std::move(A), std::move(B), std::move(b), std::move(x_star), spec.consistent,
                             std::move(meta));
}

NmfResult nmf(const DenseMatrix& X, std::size_t rank, std::size_t sweeps, Rng& rng) {
    const std::size_t m = X.rows();
    const std::size_t n = X.cols();
    if (rank == 0 || rank > std::min(m, n)) throw std::invalid_argument("nmf: need 1 <= rank <= min(m, n)");
    double total = 0.0;
    for (double v : X.data()) {
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("nmf: input must be finite and non-negative");
        total += v;
    }
    constexpr double floor = 1e-12;
    const double mean = total / static_cast<double>(m * n);
    const double scale = mean > 0.0 ? std::sqrt(mean / static_cast<double>(rank)) : 1.0;

    // column-major work arrays: W (m x r), H (r x n)
    std::vector<double> W(m * rank), H(rank * n);
    for (double& v : W) v = scale * (1.0 - rng.uniform());
    for (double& v : H) v = scale * (1.0 - rng.uniform());
    auto w = [&](std::size_t i, std::size_t p) -> double& { return W[p * m + i]; };
    auto h = [&](std::size_t p, std::size_t j) -> double& { return H[j * rank + p]; };

    auto error = [&] {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) {
                double wh = 0.0;
                for (std::size_t p = 0; p < rank; ++p) wh += w(i, p) * h(p, j);
                const double d = X(i, j) - wh;
                s += d * d;
            }
        return std::sqrt(s);
    };

    NmfResult result;
    result.errors.push_back(error());
    std::vector<double> gram(rank * rank);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        // H <- H .* (W^T X) ./ (W^T W H)
        for (std::size_t p = 0; p < rank; ++p)
            for (std::size_t q = 0; q < rank; ++q) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += w(i, p) * w(i, q);
                gram[q * rank + p] = s;
            }
        for (std::size_t j = 0; j < n; ++j) {
            const auto xj = X.column(j);
            std::vector<double> num(rank, 0.0), den(rank, 0.0);
            for (std::size_t p = 0; p < rank; ++p) {
                for (std::size_t i = 0; i < m; ++i) num[p] += w(i, p) * xj[i];
                for (std::size_t q = 0; q < rank; ++q) den[p] += gram[q * rank + p] * h(q, j);
            }
            for (std::size_t p = 0; p < rank; ++p) h(p, j) *= num[p] / std::max(den[p], floor);
        }
        // W <- W .* (X H^T) ./ (W H H^T)
        for (std::size_t p = 0; p < rank; ++p)
            for (std::size_t q = 0; q < rank; ++q) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += h(p, j) * h(q, j);
                gram[q * rank + p] = s;
            }
        std::vector<double> num(m * rank, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto xj = X.column(j);
            for (std::size_t p = 0; p < rank; ++p) {
                const double hpj = h(p, j);
                if (hpj == 0.0) continue;
                for (std::size_t i = 0; i < m; ++i) num[p * m + i] += xj[i] * hpj;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            double row[64];
            std::vector<double> heap;
            double* den = row;
            if (rank > 64) {
                heap.resize(rank);
                den = heap.data();
            }
            for (std::size_t p = 0; p < rank; ++p) {
                double s = 0.0;
                for (std::size_t q = 0; q < rank; ++q) s += w(i, q) * gram[p * rank + q];
                den[p] = s;
            }
            for (std::size_t p = 0; p < rank; ++p) w(i, p) *= num[p * m + i] / std::max(den[p], floor);
        }
        result.errors.push_back(error());
    }
    result.A = DenseMatrix(m, rank, std::move(W));
    result.B = DenseMatrix(rank, n, std::move(H));
    return result;
}

Vector wine_target() {
    Vector x(11, 0.0);
    x[0] = x[5] = x[10] = 1.0;
    return x;
}

DatasetCsvOptions wine_csv_options(const std::filesystem::path& path) {
    DatasetCsvOptions o;
    o.delimiter = sniff_delimiter(path);
    o.drop_columns = {11};
    o.auto_header = true;
    return o;
}

DenseMatrix load_wine_csv(const std::filesystem::path& path) { return load_csv_dataset(path, wine_csv_options(path)); }

FactorizedProblem wine_problem(const DenseMatrix& X, std::size_t rank, std::size_t nmf_sweeps, bool consistent,
                               Rng& rng) {
    if (X.cols() != 11)
        throw DimensionError("wine_problem: expected 11 property columns, got " + std::to_string(X.cols()));
    const std::uint64_t seed = rng.seed();
    NmfResult f = nmf(X, rank, nmf_sweeps, rng);
    Vector x_star = wine_target();
    Vector b = make_rhs(f.A, f.B, x_star, consistent, rng);
    ProblemMeta meta{3, seed, "wine"};
    return FactorizedProblem(std::move(f.A), std::move(f.B), std::move(b), std::move(x_star), consistent,
                             std::move(meta));
}

void save_problem(const FactorizedProblem& p, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "A.csv", p.A());
    write_matrix_csv(dir / "B.csv", p.B());
    write_vector_csv(dir / "b.csv", p.b());
    if (p.x_star())
        write_vector_csv(dir / "xstar.csv", *p.x_star());
    else
        std::filesystem::remove(dir / "xstar.csv");

    std::ofstream meta(dir / "meta.txt");
    if (!meta) throw CsvError("cannot write " + (dir / "meta.txt").string());
    meta << "m=" << p.m() << '\n'
         << "l=" << p.l() << '\n'
         << "n=" << p.n() << '\n'
         << "s=" << p.meta().sparsity << '\n'
         << "consistent=" << (p.consistent() ? "true" : "false") << '\n';
    if (p.meta().seed) meta << "seed=" << *p.meta().seed << '\n';
    meta << "source=" << p.meta().source << '\n';
}

FactorizedProblem load_problem(const std::filesystem::path& dir) {
    auto required = [&](const char* name) {
        const auto path = dir / name;
        if (!std::filesystem::exists(path)) throw CsvError("problem directory is missing " + path.string());
        return path;
    };

    std::map<std::string, std::string> kv;
    {
        std::ifstream in(required("meta.txt"));
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    DenseMatrix A = read_matrix_csv(required("A.csv"));
    DenseMatrix B = read_matrix_csv(required("B.csv"));
    Vector b = read_vector_csv(required("b.csv"));
    std::optional<Vector> x_star;
    if (std::filesystem::exists(dir / "xstar.csv")) x_star = read_vector_csv(dir / "xstar.csv");

    auto check = [&](const char* key, std::size_t actual, const char* file) {
        const auto it = kv.find(key);
        if (it != kv.end() && std::stoull(it->second) != actual)
            throw CsvError(std::string(file) + ": shape does not match meta.txt " + key + "=" + it->second +
                           " (found " + std::to_string(actual) + ")");
    };
    check("m", A.rows(), "A.csv");
    check("l", A.cols(), "A.csv");
    if (B.rows() != A.cols())
        throw CsvError("B.csv: has " + std::to_string(B.rows()) + " rows, A.csv has " + std::to_string(A.cols()) +
                       " columns");
    check("n", B.cols(), "B.csv");
    if (b.size() != A.rows())
        throw CsvError("b.csv: length " + std::to_string(b.size()) + " does not match A.csv rows " +
                       std::to_string(A.rows()));
    if (x_star && x_star->size() != B.cols())
        throw CsvError("xstar.csv: length " + std::to_string(x_star->size()) + " does not match B.csv columns " +
                       std::to_string(B.cols()));

    ProblemMeta meta;
    if (auto it = kv.find("s"); it != kv.end()) meta.sparsity = std::stoull(it->second);
    if (auto it = kv.find("seed"); it != kv.end()) meta.seed = std::stoull(it->second);
    if (auto it = kv.find("source"); it != kv.end()) meta.source = it->second;
    const bool consistent = kv.count("consistent") ? kv["consistent"] == "true" : true;
    return FactorizedProblem(std::move(A), std::move(B), std::move(b), std::move(x_star), consistent,
                             std::move(meta));
}

} // namespace fls
