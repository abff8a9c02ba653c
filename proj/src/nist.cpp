#include "dpsim/randomness.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

namespace dpsim {

namespace {

double clamp01(double p)
{
    if (!(p > 0.0))
        return 0.0;
    return p > 1.0 ? 1.0 : p;
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

NistResult make(const std::string& name) { return NistResult{name, {}, false, {}, false, 0.01}; }

NistResult skip(NistResult r, const std::string& why)
{
    r.skipped = true;
    r.reason = why;
    r.pass = false;
    return r;
}

NistResult finish(NistResult r, const NistParams& p)
{
    for (auto& v : r.p_values)
        v = clamp01(v);
    const std::size_t k = r.p_values.size();
    r.threshold = (p.bonferroni && k > 1) ? p.alpha / double(k) : p.alpha;
    r.pass = k > 0 && r.min_p() >= r.threshold;
    return r;
}

double chi2(const std::vector<double>& obs, const std::vector<double>& pi, double n)
{
    double c = 0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double e = n * pi[i];
        c += (obs[i] - e) * (obs[i] - e) / e;
    }
    return c;
}

// Overlapping m-bit pattern counts with wrap-around.
std::vector<double> pattern_counts(const BitSequence& b, std::size_t m)
{
    std::vector<double> v(std::size_t(1) << m, 0.0);
    if (m == 0)
        return v;
    const std::size_t n = b.size();
    const std::uint32_t mask = (std::uint32_t(1) << m) - 1;
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < m - 1; ++i)
        w = (w << 1) | b[i % n];
    for (std::size_t i = 0; i < n; ++i) {
        w = ((w << 1) | b[(i + m - 1) % n]) & mask;
        v[w] += 1.0;
    }
    return v;
}

double psi2(const BitSequence& b, std::size_t m)
{
    if (m == 0)
        return 0.0;
    auto v = pattern_counts(b, m);
    double s = 0;
    for (double x : v)
        s += x * x;
    const double n = double(b.size());
    return s * double(v.size()) / n - n;
}

double phi_apen(const BitSequence& b, std::size_t m)
{
    if (m == 0)
        return 0.0;
    auto v = pattern_counts(b, m);
    const double n = double(b.size());
    double s = 0;
    for (double x : v)
        if (x > 0)
            s += (x / n) * std::log(x / n);
    return s;
}

std::mutex fftw_plan_mutex;

}  // namespace

double NistResult::min_p() const
{
    return p_values.empty() ? 0.0 : *std::min_element(p_values.begin(), p_values.end());
}

double NistResult::mean_p() const
{
    if (p_values.empty())
        return 0.0;
    return std::accumulate(p_values.begin(), p_values.end(), 0.0) / double(p_values.size());
}

double igamc(double a, double x)
{
    if (x <= 0)
        return 1.0;
    return boost::math::gamma_q(a, x);
}

int berlekamp_massey(const std::uint8_t* s, std::size_t n)
{
    std::vector<std::uint8_t> c(n + 1, 0), b(n + 1, 0), t(n + 1, 0);
    c[0] = b[0] = 1;
    int L = 0;
    long m = -1;
    for (std::size_t N = 0; N < n; ++N) {
        std::uint8_t d = s[N];
        for (int i = 1; i <= L; ++i)
            d ^= c[i] & s[N - i];
        if (!d)
            continue;
        std::copy(c.begin(), c.end(), t.begin());
        const std::size_t shift = N - m;
        for (std::size_t i = 0; i + shift <= n; ++i)
            c[i + shift] ^= b[i];
        if (2 * L <= long(N)) {
            L = int(N + 1 - L);
            m = long(N);
            std::swap(b, t);
        }
    }
    return L;
}

int gf2_rank(std::vector<std::uint32_t> rows, int cols)
{
    int rank = 0;
    const int nr = int(rows.size());
    for (int col = cols - 1; col >= 0 && rank < nr; --col) {
        const std::uint32_t bit = std::uint32_t(1) << col;
        int piv = -1;
        for (int r = rank; r < nr; ++r)
            if (rows[r] & bit) {
                piv = r;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(rows[rank], rows[piv]);
        for (int r = 0; r < nr; ++r)
            if (r != rank && (rows[r] & bit))
                rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

std::vector<std::vector<std::uint8_t>> aperiodic_templates(int m)
{
    std::vector<std::vector<std::uint8_t>> out;
    for (std::uint32_t v = 0; v < (std::uint32_t(1) << m); ++v) {
        std::vector<std::uint8_t> t(m);
        for (int i = 0; i < m; ++i)
            t[i] = (v >> (m - 1 - i)) & 1;
        bool periodic = false;
        for (int k = 1; k < m && !periodic; ++k)
            periodic = std::equal(t.begin(), t.begin() + (m - k), t.begin() + k);
        if (!periodic)
            out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------

NistResult monobit(const BitSequence& b, const NistParams& p)
{
    auto r = make("monobit");
    if (b.empty())
        return skip(r, "empty input");
    const double n = double(b.size());
    double s = 0;
    for (auto x : b)
        s += x ? 1.0 : -1.0;
    r.p_values = {std::erfc(std::abs(s) / std::sqrt(n) / std::sqrt(2.0))};
    return finish(r, p);
}

NistResult block_frequency(const BitSequence& b, const NistParams& p)
{
    auto r = make("frequency_within_block");
    const std::size_t M = p.block_frequency_m;
    if (M == 0)
        throw std::invalid_argument("block_frequency: M must be > 0");
    const std::size_t N = b.size() / M;
    if (N < 1)
        return skip(r, "fewer than one block");
    double c = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double ones = 0;
        for (std::size_t j = 0; j < M; ++j)
            ones += b[i * M + j];
        double pi = ones / double(M) - 0.5;
        c += pi * pi;
    }
    c *= 4.0 * double(M);
    r.p_values = {igamc(double(N) / 2.0, c / 2.0)};
    return finish(r, p);
}

NistResult runs(const BitSequence& b, const NistParams& p)
{
    auto r = make("runs");
    if (b.size() < 2)
        return skip(r, "fewer than 2 bits");
    const double n = double(b.size());
    double ones = 0;
    for (auto x : b)
        ones += x;
    const double pi = ones / n;
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        // frequency prerequisite failed
        r.p_values = {0.0};
        return finish(r, p);
    }
    double v = 1;
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        v += b[i] != b[i + 1];
    const double q = pi * (1 - pi);
    r.p_values = {std::erfc(std::abs(v - 2 * n * q) / (2 * std::sqrt(2 * n) * q))};
    return finish(r, p);
}

NistResult longest_run(const BitSequence& b, const NistParams& p)
{
    auto r = make("longest_run_ones_in_a_block");
    const std::size_t n = b.size();
    if (n < 128)
        return skip(r, "needs n >= 128");
    std::size_t M;
    int lo, K;
    std::vector<double> pi;
    if (n < 6272) {
        M = 8, lo = 1, K = 3;
        pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
    } else if (n < 750000) {
        M = 128, lo = 4, K = 5;
        pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
    } else {
        M = 10000, lo = 10, K = 6;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    const std::size_t N = n / M;
    std::vector<double> v(K + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        int run = 0, best = 0;
        for (std::size_t j = 0; j < M; ++j) {
            run = b[i * M + j] ? run + 1 : 0;
            best = std::max(best, run);
        }
        int cls = std::clamp(best - lo, 0, K);
        v[cls] += 1;
    }
    r.p_values = {igamc(K / 2.0, chi2(v, pi, double(N)) / 2.0)};
    return finish(r, p);
}

NistResult matrix_rank(const BitSequence& b, const NistParams& p)
{
    auto r = make("binary_matrix_rank");
    constexpr int Q = 32;
    const std::size_t N = b.size() / (Q * Q);
    if (N < 38)
        return skip(r, "needs at least 38 32x32 matrices");
    auto prob = [](int rk) {
        double v = std::pow(2.0, double(rk * (Q + Q - rk) - Q * Q));
        for (int i = 0; i < rk; ++i)
            v *= (1 - std::pow(2.0, i - Q)) * (1 - std::pow(2.0, i - Q)) / (1 - std::pow(2.0, i - rk));
        return v;
    };
    const double p32 = prob(Q), p31 = prob(Q - 1), prest = 1 - p32 - p31;
    double f32 = 0, f31 = 0;
    for (std::size_t k = 0; k < N; ++k) {
        std::vector<std::uint32_t> rows(Q, 0);
        const std::uint8_t* m = &b[k * Q * Q];
        for (int i = 0; i < Q; ++i)
            for (int j = 0; j < Q; ++j)
                rows[i] = (rows[i] << 1) | m[i * Q + j];
        int rk = gf2_rank(rows, Q);
        f32 += rk == Q;
        f31 += rk == Q - 1;
    }
    const double nn = double(N);
    double c = (f32 - nn * p32) * (f32 - nn * p32) / (nn * p32) + (f31 - nn * p31) * (f31 - nn * p31) / (nn * p31) +
               (nn - f32 - f31 - nn * prest) * (nn - f32 - f31 - nn * prest) / (nn * prest);
    r.p_values = {std::exp(-c / 2.0)};
    return finish(r, p);
}

NistResult dft(const BitSequence& b, const NistParams& p)
{
    auto r = make("dft");
    const std::size_t n = b.size();
    if (n < 2)
        return skip(r, "fewer than 2 bits");
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> g(fftw_plan_mutex);
        plan = fftw_plan_dft_r2c_1d(int(n), in, out, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < n; ++i)
        in[i] = b[i] ? 1.0 : -1.0;
    fftw_execute(plan);
    const double T = std::sqrt(std::log(1 / 0.05) * double(n));
    double n1 = 0;
    for (std::size_t j = 0; j < n / 2; ++j)
        n1 += std::hypot(out[j][0], out[j][1]) < T;
    {
        std::lock_guard<std::mutex> g(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    const double n0 = 0.95 * double(n) / 2.0;
    const double d = (n1 - n0) / std::sqrt(double(n) * 0.95 * 0.05 / 4.0);
    r.p_values = {std::erfc(std::abs(d) / std::sqrt(2.0))};
    return finish(r, p);
}

NistResult non_overlapping_template(const BitSequence& b, const NistParams& p)
{
    auto r = make("non_overlapping_template_matching");
    const std::size_t m = p.non_overlapping_m, N = p.non_overlapping_blocks;
    if (m < 2 || m > 20 || N < 1)
        throw std::invalid_argument("non_overlapping_template: bad parameters");
    const std::size_t M = b.size() / N;
    if (M < m + 1)
        return skip(r, "blocks shorter than the template");
    // window value starting at each position
    const std::size_t nw = b.size() - m + 1;
    std::vector<std::uint32_t> win(nw);
    std::uint32_t w = 0;
    const std::uint32_t mask = (std::uint32_t(1) << m) - 1;
    for (std::size_t i = 0; i < b.size(); ++i) {
        w = ((w << 1) | b[i]) & mask;
        if (i + 1 >= m)
            win[i + 1 - m] = w;
    }
    const double mu = double(M - m + 1) / std::pow(2.0, double(m));
    const double var = double(M) * (1.0 / std::pow(2.0, double(m)) - (2.0 * m - 1) / std::pow(2.0, 2.0 * m));
    for (const auto& t : aperiodic_templates(int(m))) {
        std::uint32_t tv = 0;
        for (auto x : t)
            tv = (tv << 1) | x;
        double c = 0;
        for (std::size_t j = 0; j < N; ++j) {
            double W = 0;
            const std::size_t end = j * M + M - m + 1;
            for (std::size_t i = j * M; i < end;) {
                if (win[i] == tv) {
                    W += 1;
                    i += m;
                } else {
                    ++i;
                }
            }
            c += (W - mu) * (W - mu) / var;
        }
        r.p_values.push_back(igamc(double(N) / 2.0, c / 2.0));
    }
    return finish(r, p);
}

NistResult overlapping_template(const BitSequence& b, const NistParams& p)
{
    auto r = make("overlapping_template_matching");
    const std::size_t m = p.overlapping_m;
    constexpr std::size_t M = 1032;
    constexpr int K = 5;
    if (m != 9)
        throw std::invalid_argument("overlapping_template: class probabilities are tabulated for m = 9 only");
    const std::size_t N = b.size() / M;
    if (N < 5)
        return skip(r, "needs at least 5 blocks of 1032 bits");
    const std::vector<double> pi = {0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865};
    std::vector<double> v(K + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        int W = 0, run = 0;
        for (std::size_t i = 0; i < M; ++i) {
            run = b[j * M + i] ? run + 1 : 0;
            if (run >= int(m))
                ++W;
        }
        v[std::min(W, K)] += 1;
    }
    r.p_values = {igamc(K / 2.0, chi2(v, pi, double(N)) / 2.0)};
    return finish(r, p);
}

NistResult maurer_universal(const BitSequence& b, const NistParams& p)
{
    auto r = make("maurers_universal");
    static const double expected[17] = {0,         0.73264948, 1.5374383, 2.40160681, 3.31122472, 4.25342659,
                                        5.2177052, 6.1962507,  7.1836656, 8.1764248,  9.1723243,  10.170032,
                                        11.168765, 12.168070,  13.167693, 14.167488,  15.167379};
    static const double variance[17] = {0,     0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238,
                                        3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421};
    const std::size_t n = b.size();
    std::size_t L = p.maurer_L;
    if (L == 0) {
        static const std::size_t bounds[] = {387840,   904960,    2068480,   4654080,   10342400,  22753280,
                                             49643520, 107560960, 231669760, 496435200, 1059061760};
        for (std::size_t i = 0; i < 11; ++i)
            if (n >= bounds[i])
                L = 6 + i;
        if (L == 0)
            return skip(r, "needs n >= 387840");
    }
    if (L < 1 || L > 16)
        throw std::invalid_argument("maurer_universal: L out of range");
    const std::size_t Q = p.maurer_Q ? p.maurer_Q : 10 * (std::size_t(1) << L);
    const std::size_t blocks = n / L;
    if (blocks <= Q)
        return skip(r, "no test blocks after initialisation");
    const std::size_t K = blocks - Q;
    std::vector<std::size_t> last(std::size_t(1) << L, 0);
    auto block = [&](std::size_t i) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < L; ++j)
            v = (v << 1) | b[i * L + j];
        return v;
    };
    for (std::size_t i = 1; i <= Q; ++i)
        last[block(i - 1)] = i;
    double sum = 0;
    for (std::size_t i = Q + 1; i <= Q + K; ++i) {
        std::size_t v = block(i - 1);
        sum += std::log2(double(i - last[v]));
        last[v] = i;
    }
    const double fn = sum / double(K);
    const double c = 0.7 - 0.8 / double(L) + (4 + 32.0 / double(L)) * std::pow(double(K), -3.0 / double(L)) / 15;
    const double sigma = c * std::sqrt(variance[L] / double(K));
    r.p_values = {std::erfc(std::abs(fn - expected[L]) / (std::sqrt(2.0) * sigma))};
    return finish(r, p);
}

NistResult linear_complexity(const BitSequence& b, const NistParams& p)
{
    auto r = make("linear_complexity");
    const std::size_t M = p.linear_complexity_m;
    constexpr int K = 6;
    if (M < 2)
        throw std::invalid_argument("linear_complexity: M must be >= 2");
    const std::size_t N = b.size() / M;
    if (N < 200)
        return skip(r, "needs at least 200 blocks");
    const std::vector<double> pi = {0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833};
    const double sgn = (M % 2) ? -1.0 : 1.0;
    const double mu = double(M) / 2.0 + (9.0 - sgn) / 36.0 - (double(M) / 3.0 + 2.0 / 9.0) / std::pow(2.0, double(M));
    std::vector<double> v(K + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        double L = berlekamp_massey(&b[i * M], M);
        double T = sgn * (L - mu) + 2.0 / 9.0;
        int cls;
        if (T <= -2.5)
            cls = 0;
        else if (T <= -1.5)
            cls = 1;
        else if (T <= -0.5)
            cls = 2;
        else if (T <= 0.5)
            cls = 3;
        else if (T <= 1.5)
            cls = 4;
        else if (T <= 2.5)
            cls = 5;
        else
            cls = 6;
        v[cls] += 1;
    }
    r.p_values = {igamc(K / 2.0, chi2(v, pi, double(N)) / 2.0)};
    return finish(r, p);
}

NistResult serial(const BitSequence& b, const NistParams& p)
{
    auto r = make("serial");
    const std::size_t m = p.serial_m;
    if (m < 2 || m > 24)
        throw std::invalid_argument("serial: m out of range");
    if ((std::size_t(1) << m) > b.size())
        return skip(r, "2^m exceeds n");
    const double a = psi2(b, m), b1 = psi2(b, m - 1), b2 = psi2(b, m - 2);
    const double d1 = a - b1, d2 = a - 2 * b1 + b2;
    r.p_values = {igamc(std::pow(2.0, double(m) - 2) , d1 / 2.0), igamc(std::pow(2.0, double(m) - 3), d2 / 2.0)};
    return finish(r, p);
}

NistResult approximate_entropy(const BitSequence& b, const NistParams& p)
{
    auto r = make("approximate_entropy");
    const std::size_t m = p.approximate_entropy_m;
    if (m < 1 || m > 23)
        throw std::invalid_argument("approximate_entropy: m out of range");
    if ((std::size_t(1) << m) > b.size())
        return skip(r, "2^m exceeds n");
    const double n = double(b.size());
    const double apen = phi_apen(b, m) - phi_apen(b, m + 1);
    const double c = 2.0 * n * (std::log(2.0) - apen);
    r.p_values = {igamc(std::pow(2.0, double(m) - 1), c / 2.0)};
    return finish(r, p);
}

NistResult cumulative_sums(const BitSequence& b, const NistParams& p)
{
    auto r = make("cumulative_sums");
    if (b.size() < 2)
        return skip(r, "fewer than 2 bits");
    const long n = long(b.size());
    auto pvalue = [n](long z) {
        const double sn = std::sqrt(double(n));
        const double zd = double(z);
        double s1 = 0, s2 = 0;
        for (long k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k)
            s1 += phi((4 * k + 1) * zd / sn) - phi((4 * k - 1) * zd / sn);
        for (long k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k)
            s2 += phi((4 * k + 3) * zd / sn) - phi((4 * k + 1) * zd / sn);
        return 1.0 - s1 + s2;
    };
    long s = 0, zf = 0;
    for (auto x : b) {
        s += x ? 1 : -1;
        zf = std::max(zf, std::abs(s));
    }
    long zr = 0;
    s = 0;
    for (auto it = b.rbegin(); it != b.rend(); ++it) {
        s += *it ? 1 : -1;
        zr = std::max(zr, std::abs(s));
    }
    r.p_values = {pvalue(std::max(zf, 1L)), pvalue(std::max(zr, 1L))};
    return finish(r, p);
}

namespace {

struct Walk {
    std::size_t cycles = 0;
    std::vector<std::vector<int>> visits;  // per cycle (or one total), per state
};

// Visits to states -limit..-1, 1..limit; a cycle ends at each return to zero
// and at the end of the sequence.
Walk excursion_walk(const BitSequence& b, int limit, bool per_cycle)
{
    Walk w;
    std::vector<int> cur(2 * limit, 0);
    long s = 0;
    for (auto x : b) {
        s += x ? 1 : -1;
        if (s == 0) {
            ++w.cycles;
            if (per_cycle) {
                w.visits.push_back(cur);
                std::fill(cur.begin(), cur.end(), 0);
            }
        } else if (std::abs(s) <= limit) {
            cur[s < 0 ? s + limit : s + limit - 1] += 1;
        }
    }
    if (s != 0)
        ++w.cycles;
    if (s != 0 || !per_cycle)
        w.visits.push_back(cur);
    return w;
}

}  // namespace

NistResult random_excursions(const BitSequence& b, const NistParams& p)
{
    auto r = make("random_excursion");
    const Walk w = excursion_walk(b, 4, true);
    const double J = double(w.cycles);
    const double need = std::max(0.005 * std::sqrt(double(b.size())), double(p.excursion_min_cycles));
    if (w.cycles == 0 || J < need)
        return skip(r, "too few cycles (J = " + std::to_string(w.cycles) + ")");
    for (int x : {-4, -3, -2, -1, 1, 2, 3, 4}) {
        const double ax = std::abs(x);
        const double q = 1 - 1 / (2 * ax);
        std::vector<double> pi(6);
        pi[0] = q;
        for (int k = 1; k <= 4; ++k)
            pi[k] = std::pow(q, k - 1) / (4 * ax * ax);
        pi[5] = std::pow(q, 4) / (2 * ax);
        const int col = x < 0 ? x + 4 : x + 3;
        std::vector<double> v(6, 0.0);
        for (const auto& c : w.visits)
            v[std::min(c[col], 5)] += 1;
        r.p_values.push_back(igamc(2.5, chi2(v, pi, J) / 2.0));
    }
    return finish(r, p);
}

NistResult random_excursions_variant(const BitSequence& b, const NistParams& p)
{
    auto r = make("random_excursion_variant");
    const Walk w = excursion_walk(b, 9, false);
    const double J = double(w.cycles);
    const double need = std::max(0.005 * std::sqrt(double(b.size())), double(p.excursion_min_cycles));
    if (w.cycles == 0 || J < need)
        return skip(r, "too few cycles (J = " + std::to_string(w.cycles) + ")");
    const auto& xi = w.visits.front();
    for (int x = -9; x <= 9; ++x) {
        if (x == 0)
            continue;
        const int col = x < 0 ? x + 9 : x + 8;
        r.p_values.push_back(std::erfc(std::abs(xi[col] - J) / std::sqrt(2 * J * (4 * std::abs(x) - 2))));
    }
    return finish(r, p);
}

std::vector<NistResult> nist_suite(const BitSequence& bits, const NistParams& p)
{
    return {monobit(bits, p),
            block_frequency(bits, p),
            runs(bits, p),
            longest_run(bits, p),
            matrix_rank(bits, p),
            dft(bits, p),
            non_overlapping_template(bits, p),
            overlapping_template(bits, p),
            maurer_universal(bits, p),
            linear_complexity(bits, p),
            serial(bits, p),
            approximate_entropy(bits, p),
            cumulative_sums(bits, p),
            random_excursions(bits, p),
            random_excursions_variant(bits, p)};
}

}  // namespace dpsim
