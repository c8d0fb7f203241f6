#include "tiling/descent.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <set>

namespace tiling::descent {

using arith::kInfinity;

namespace {

i64 content_of(const DiagonalQuadric &q)
{
    i64 g = 0;
    for (i64 c : q)
        g = std::gcd(g, c < 0 ? -c : c);
    return g == 0 ? 1 : g;
}

DiagonalQuadric reduce(DiagonalQuadric q)
{
    i64 g = content_of(q);
    for (auto &c : q)
        c /= g;
    return q;
}

// a x^2 + b on a p-adic ball x0 + p^k Z_p.
struct EvenPoly {
    i128 a = 0;
    i128 b = 0;
    i128 at(i128 x) const { return a * x * x + b; }
};

// The fibration of C over the line (t : u3): C has a point above (t : u3)
// exactly when both binary forms below take square values (zero included).
struct Fibration {
    i128 a_t, a_u; // u1^2 * alpha2^2 = a_t t^2 + a_u u3^2
    i128 b_t, b_u; // u2^2 * alpha1^2 = b_t t^2 + b_u u3^2
    i128 alpha1, alpha2;
};

Fibration fibration_of(const QuadricIntersection &c)
{
    const auto &h1 = c.H[0]; // no u1
    const auto &h2 = c.H[1]; // no u2
    Fibration f;
    f.alpha2 = h2[U1];
    f.a_u = -static_cast<i128>(h2[U1]) * h2[U3];
    f.a_t = -static_cast<i128>(h2[U1]) * h2[T];
    f.alpha1 = h1[U2];
    f.b_u = -static_cast<i128>(h1[U2]) * h1[U3];
    f.b_t = -static_cast<i128>(h1[U2]) * h1[T];
    return f;
}

enum class Ball { Square, NonSquare, Root, Unknown };

int val(i128 x, i64 p)
{
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

Ball analyse(const EvenPoly &P, i128 x0, int k, i64 p)
{
    i128 v = P.at(x0);
    if (v == 0)
        return Ball::Root;
    int v0 = val(v, p);
    int e = p == 2 ? 3 : 1;
    int vd = INT_MAX;
    if (P.a != 0) {
        vd = val(P.a, p) + 2 * k;
        if (x0 != 0)
            vd = std::min(vd, val(2 * P.a * x0, p) + k);
    }
    if (vd >= v0 + e)
        return arith::is_square_class(arith::square_class(v, p), p) ? Ball::Square : Ball::NonSquare;
    if (P.a != 0 && x0 != 0) {
        int vder = val(2 * P.a * x0, p);
        if (v0 > 2 * vder && v0 - vder >= k)
            return Ball::Root;
    }
    return Ball::Unknown;
}

int int128_level_cap(const EvenPoly &P, const EvenPoly &Q, i64 p)
{
    auto lg = [](i128 x) {
        long double d = static_cast<long double>(x < 0 ? -x : x);
        return d < 1 ? 0.0L : std::log2(d);
    };
    long double big = std::max(std::max(lg(P.a), lg(Q.a)), std::max(lg(P.b), lg(Q.b)));
    long double lp = std::log2(static_cast<long double>(p));
    int cap = static_cast<int>((118.0L - big) / (2.0L * lp));
    return std::max(cap, 1);
}

struct BallSearch {
    EvenPoly P, Q;
    i64 p;
    int max_level;
    bool undecided = false;

    // true iff some x in x0 + p^k Z_p gives squares for both P and Q
    bool run(i128 x0, int k, i128 pk)
    {
        Ball sp = analyse(P, x0, k, p);
        Ball sq = analyse(Q, x0, k, p);
        if (sp == Ball::NonSquare || sq == Ball::NonSquare)
            return false;
        if (sp == Ball::Square && (sq == Ball::Square || sq == Ball::Root))
            return true;
        if (sq == Ball::Square && sp == Ball::Root)
            return true;
        if (k >= max_level) {
            undecided = true;
            return false;
        }
        for (i64 j = 0; j < p; ++j)
            if (run(x0 + j * pk, k + 1, pk * p))
                return true;
        return false;
    }
};

struct Chart {
    EvenPoly P, Q;
    i128 x0;
    int k;
    bool t_is_one; // chart t = 1, u3 = x; otherwise u3 = 1, t = x
};

std::array<Chart, 2> charts(const Fibration &f, i64 p)
{
    Chart c1{{f.a_u, f.a_t}, {f.b_u, f.b_t}, 0, 0, true};
    Chart c2{{f.a_t, f.a_u}, {f.b_t, f.b_u}, 0, 1, false};
    (void)p;
    return {c1, c2};
}

bool real_solvable(const Fibration &f)
{
    // X = t^2, Y = u3^2 on the closed quadrant; look for a ray with both forms >= 0.
    std::vector<std::pair<i128, i128>> rays = {{1, 0}, {0, 1}};
    auto add_zero_ray = [&](i128 ct, i128 cu) {
        if ((ct < 0 && cu > 0) || (ct > 0 && cu < 0))
            rays.push_back({cu < 0 ? -cu : cu, ct < 0 ? -ct : ct});
    };
    add_zero_ray(f.a_t, f.a_u);
    add_zero_ray(f.b_t, f.b_u);
    for (auto [X, Y] : rays) {
        i128 A = f.a_t * X + f.a_u * Y;
        i128 B = f.b_t * X + f.b_u * Y;
        if (A >= 0 && B >= 0)
            return true;
    }
    return false;
}

int mmax(const SquarefreeInteger &n, i64 p)
{
    // v_p(2^8 3^4 n^4) + 2
    int v = 0;
    if (p == 2)
        v = 8 + 4 * (n.has_two ? 1 : 0);
    else if (p == 3)
        v = 4 + 4 * (n.has_three ? 1 : 0);
    else
        v = std::binary_search(n.odd_primes.begin(), n.odd_primes.end(), p) ? 4 : 0;
    return v + 2;
}

u64 pow_u64(u64 p, int k)
{
    u128 r = 1;
    for (int i = 0; i < k; ++i)
        r *= p;
    if (r >> 63)
        throw Error(ErrorKind::Overflow, "prime power exceeds 63 bits");
    return static_cast<u64>(r);
}

int precision_for(i64 p)
{
    // p^(N+1) must fit in 63 bits for the unit square roots.
    int N = 0;
    u128 r = p;
    while (!((r * static_cast<u128>(p)) >> 62)) {
        r *= p;
        ++N;
    }
    return std::max(N, 1);
}

// Square root of a nonzero p-adic square X (an exact integer) modulo p^N.
u64 padic_sqrt(i128 X, i64 p, int N)
{
    int v = val(X, p);
    i128 w = X;
    for (int i = 0; i < v; ++i)
        w /= p;
    if (v % 2)
        throw Error(ErrorKind::InternalDisagreement, "square root of an odd-valuation element");
    u64 mod1 = pow_u64(p, N + 1);
    auto r = arith::sqrt_unit_mod_pk(arith::mod(w, mod1), p, N + 1);
    if (!r)
        throw Error(ErrorKind::InternalDisagreement, "square root of a non-square unit");
    u64 m = pow_u64(p, N);
    if (v / 2 >= N)
        return 0;
    return arith::mulmod(pow_u64(p, v / 2), *r % m, m);
}

struct PointSearch {
    EvenPoly P, Q;
    i64 p;
    int max_level;
    std::mt19937_64 &rng;
    long budget = 200000;

    // Returns a ball on which both forms are stable squares.
    std::optional<std::pair<i128, int>> run(i128 x0, int k, i128 pk)
    {
        if (--budget < 0)
            return std::nullopt;
        Ball sp = analyse(P, x0, k, p);
        Ball sq = analyse(Q, x0, k, p);
        if (sp == Ball::NonSquare || sq == Ball::NonSquare)
            return std::nullopt;
        if (sp == Ball::Square && sq == Ball::Square)
            return std::make_pair(x0, k);
        if (k >= max_level)
            return std::nullopt;
        std::vector<i64> order(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (i64 j : order) {
            auto r = run(x0 + j * pk, k + 1, pk * p);
            if (r)
                return r;
        }
        return std::nullopt;
    }
};

std::optional<LocalPoint> real_point(const QuadricIntersection &c, std::mt19937_64 &rng)
{
    Fibration f = fibration_of(c);
    if (!real_solvable(f))
        return std::nullopt;
    std::uniform_real_distribution<long double> angle(0.0L, 3.14159265358979323846L);
    for (int attempt = 0; attempt < 20000; ++attempt) {
        long double th = angle(rng);
        long double t = std::cos(th), u3 = std::sin(th);
        long double A = static_cast<long double>(f.a_t) * t * t + static_cast<long double>(f.a_u) * u3 * u3;
        long double B = static_cast<long double>(f.b_t) * t * t + static_cast<long double>(f.b_u) * u3 * u3;
        long double scale = std::fabs(static_cast<long double>(f.a_t)) + std::fabs(static_cast<long double>(f.a_u)) +
                            std::fabs(static_cast<long double>(f.b_t)) + std::fabs(static_cast<long double>(f.b_u));
        if (A <= 1e-6L * scale || B <= 1e-6L * scale)
            continue;
        long double a1 = static_cast<long double>(f.alpha1), a2 = static_cast<long double>(f.alpha2);
        long double s1 = (rng() & 1) ? 1.0L : -1.0L, s2 = (rng() & 1) ? 1.0L : -1.0L;
        LocalPoint pt;
        pt.place = kInfinity;
        pt.real = {t * a1 * a2, s1 * std::sqrt(A) * a1, s2 * std::sqrt(B) * a2, u3 * a1 * a2};
        return pt;
    }
    throw Error(ErrorKind::Undecided, "no interior real point found");
}

} // namespace

i128 evaluate(const DiagonalQuadric &q, const std::array<i128, 4> &x)
{
    i128 s = 0;
    for (int i = 0; i < 4; ++i)
        s += static_cast<i128>(q[i]) * x[i] * x[i];
    return s;
}

u64 evaluate_mod(const DiagonalQuadric &q, const LocalPoint &pt)
{
    u64 m = pt.modulus, s = 0;
    for (int i = 0; i < 4; ++i) {
        u64 sq = arith::mulmod(pt.coords[i], pt.coords[i], m);
        s = (s + arith::mulmod(arith::mod(q[i], m), sq, m)) % m;
    }
    return s;
}

bool on_curve(const QuadricIntersection &c, const LocalPoint &pt)
{
    if (pt.place == kInfinity) {
        long double scale = 0, worst = 0;
        for (const auto &q : c.H) {
            long double s = 0, a = 0;
            for (int i = 0; i < 4; ++i) {
                s += static_cast<long double>(q[i]) * pt.real[i] * pt.real[i];
                a += std::fabs(static_cast<long double>(q[i]) * pt.real[i] * pt.real[i]);
            }
            worst = std::max(worst, std::fabs(s));
            scale = std::max(scale, a);
        }
        return worst <= 1e-9L * scale;
    }
    for (const auto &q : c.H)
        if (evaluate_mod(q, pt) != 0)
            return false;
    return true;
}

QuadricIntersection curve_for(const SquarefreeInteger &n, const TwoCoverClass &lambda)
{
    // validates the support of lambda
    (void)monsky::encode_pair(lambda, n);
    QuadricIntersection c;
    c.n = n;
    c.lambda = lambda;
    c.e1 = n.value;
    c.e2 = -3 * n.value;
    i64 b1 = lambda.b1, b2 = lambda.b2, b12 = lambda.b1 * lambda.b2;
    c.H[0] = reduce({-(c.e2 - c.e1), 0, b2, -b12});
    c.H[1] = reduce({-c.e2, b1, 0, -b12});
    c.H[2] = reduce({-c.e1, b1, -b2, 0});
    return c;
}

std::vector<i64> place_set(const SquarefreeInteger &n)
{
    std::vector<i64> s = {kInfinity, 2, 3};
    for (i64 p : n.odd_primes)
        s.push_back(p);
    return s;
}

int hensel_level_bound(const SquarefreeInteger &n, i64 p) { return 2 * mmax(n, p) + 1; }

bool locally_solvable(const QuadricIntersection &c, i64 place)
{
    Fibration f = fibration_of(c);
    if (place == kInfinity)
        return real_solvable(f);
    i64 p = place;
    int guard = hensel_level_bound(c.n, p);
    for (const Chart &ch : charts(f, p)) {
        BallSearch s{ch.P, ch.Q, p, std::min(guard, int128_level_cap(ch.P, ch.Q, p))};
        i128 pk = 1;
        for (int i = 0; i < ch.k; ++i)
            pk *= p;
        if (s.run(ch.x0, ch.k, pk))
            return true;
        if (s.undecided)
            throw Error(ErrorKind::Undecided, "place " + std::to_string(p) + " for (" + std::to_string(c.lambda.b1) +
                                                  "," + std::to_string(c.lambda.b2) + ") n=" +
                                                  std::to_string(c.n.value));
    }
    return false;
}

bool hensel_point_search(const QuadricIntersection &c, i64 p)
{
    const int L = hensel_level_bound(c.n, p);
    const DiagonalQuadric &F = c.H[0], &G = c.H[1];
    static const int order[4] = {U1, U2, U3, T};
    bool undecided = false;

    auto minor_ok = [&](const std::array<i128, 4> &x, int k) {
        int best = INT_MAX;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                i128 det = 4 * (static_cast<i128>(F[i]) * G[j] - static_cast<i128>(F[j]) * G[i]) * x[i] * x[j];
                if (det != 0)
                    best = std::min(best, val(det, p));
            }
        return best != INT_MAX && 2 * best + 1 <= k;
    };

    // x satisfies both forms modulo p^k
    auto dfs = [&](auto &&self, const std::array<i128, 4> &x, int k, i128 pk, int chart) -> bool {
        if (minor_ok(x, k))
            return true;
        if (k >= L) {
            undecided = true;
            return false;
        }
        i128 next = pk * p;
        std::array<int, 3> free_idx{};
        int nf = 0;
        for (int i = 0; i < 4; ++i)
            if (i != order[chart])
                free_idx[nf++] = i;
        for (i64 d0 = 0; d0 < p; ++d0)
            for (i64 d1 = 0; d1 < p; ++d1)
                for (i64 d2 = 0; d2 < p; ++d2) {
                    std::array<i128, 4> y = x;
                    y[free_idx[0]] += d0 * pk;
                    y[free_idx[1]] += d1 * pk;
                    y[free_idx[2]] += d2 * pk;
                    if (evaluate(F, y) % next != 0 || evaluate(G, y) % next != 0)
                        continue;
                    if (self(self, y, k + 1, next, chart))
                        return true;
                }
        return false;
    };

    for (int chart = 0; chart < 4; ++chart) {
        // coordinates before the chart coordinate are divisible by p
        std::vector<int> free;
        for (int i = chart + 1; i < 4; ++i)
            free.push_back(order[i]);
        i64 total = 1;
        for (std::size_t i = 0; i < free.size(); ++i)
            total *= p;
        for (i64 code = 0; code < total; ++code) {
            std::array<i128, 4> x{0, 0, 0, 0};
            x[order[chart]] = 1;
            i64 cc = code;
            for (int idx : free) {
                x[idx] = cc % p;
                cc /= p;
            }
            if (evaluate(F, x) % p != 0 || evaluate(G, x) % p != 0)
                continue;
            if (dfs(dfs, x, 1, p, chart))
                return true;
        }
    }
    if (undecided)
        throw Error(ErrorKind::Undecided, "Hensel search at " + std::to_string(p) + " reached level " +
                                              std::to_string(L));
    return false;
}

std::optional<LocalPoint> find_local_point(const QuadricIntersection &c, i64 place, std::mt19937_64 &rng)
{
    if (place == kInfinity)
        return real_point(c, rng);
    i64 p = place;
    if (!locally_solvable(c, p))
        return std::nullopt;
    Fibration f = fibration_of(c);
    auto chs = charts(f, p);
    int N = precision_for(p);
    u64 m = pow_u64(p, N);
    for (int attempt = 0; attempt < 64; ++attempt) {
        int which = static_cast<int>(rng() & 1);
        for (int tryc = 0; tryc < 2; ++tryc) {
            const Chart &ch = chs[(which + tryc) % 2];
            int cap = int128_level_cap(ch.P, ch.Q, p);
            PointSearch s{ch.P, ch.Q, p, std::max(1, std::min(cap - 1, 40)), rng};
            i128 pk = 1;
            for (int i = 0; i < ch.k; ++i)
                pk *= p;
            auto ball = s.run(ch.x0, ch.k, pk);
            if (!ball)
                continue;
            // random element of the ball, kept small
            i128 step = 1;
            for (int i = 0; i < ball->second; ++i)
                step *= p;
            i128 x = ball->first + step * static_cast<i128>(rng() % static_cast<u64>(p));
            i128 A = ch.P.at(x), B = ch.Q.at(x);
            if (A == 0 || B == 0)
                continue;
            u64 sa = padic_sqrt(A, p, N), sb = padic_sqrt(B, p, N);
            if (rng() & 1)
                sa = (m - sa) % m;
            if (rng() & 1)
                sb = (m - sb) % m;
            u64 a12 = arith::mod(f.alpha1 * f.alpha2, m);
            u64 xm = arith::mod(x, m);
            std::array<u64, 4> co{};
            co[T] = arith::mulmod(ch.t_is_one ? 1 : xm, a12, m);
            co[U3] = arith::mulmod(ch.t_is_one ? xm : 1, a12, m);
            co[U1] = arith::mulmod(sa, arith::mod(f.alpha1, m), m);
            co[U2] = arith::mulmod(sb, arith::mod(f.alpha2, m), m);
            // strip a common power of p
            int s_min = N;
            for (u64 v : co)
                if (v != 0)
                    s_min = std::min(s_min, val(static_cast<i128>(v), p));
            if (N - s_min < std::min(N, 3))
                continue;
            u64 ps = pow_u64(p, s_min);
            LocalPoint pt;
            pt.place = p;
            pt.precision = N - s_min;
            pt.modulus = pow_u64(p, pt.precision);
            for (int i = 0; i < 4; ++i)
                pt.coords[i] = (co[i] / ps) % pt.modulus;
            return pt;
        }
    }
    throw Error(ErrorKind::Undecided, "no local point constructed at " + std::to_string(p));
}

OracleResult selmer_group_oracle(const SquarefreeInteger &n)
{
    const int t = n.t();
    if (t > 4)
        throw Error(ErrorKind::TooLarge, "oracle enumeration needs t <= 4");
    const std::size_t dim = 2 * t + 6;
    auto places = place_set(n);
    OracleResult res;
    std::vector<gf2::BitVector> found;
    for (u64 code = 0; code < (u64(1) << dim); ++code) {
        gf2::BitVector v(dim);
        for (std::size_t i = 0; i < dim; ++i)
            v.set(i, (code >> i) & 1);
        TwoCoverClass lam = monsky::decode_vector(v, n);
        QuadricIntersection c = curve_for(n, lam);
        bool ok = true;
        for (i64 pl : places) {
            if (!locally_solvable(c, pl)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            res.classes.push_back(lam);
            found.push_back(v);
        }
    }
    gf2::BitMatrix span(found.size(), dim);
    for (std::size_t i = 0; i < found.size(); ++i)
        span.set_row(i, found[i]);
    std::size_t r = gf2::rank(span);
    res.dimension = static_cast<int>(r);
    res.closed = found.size() == (std::size_t(1) << r);
    std::set<std::pair<i64, i64>> have;
    for (auto &c : res.classes)
        have.insert({c.b1, c.b2});
    for (auto &tc : monsky::torsion_classes(n)) {
        auto v = monsky::encode_pair(tc, n);
        auto back = monsky::decode_vector(v, n);
        if (!have.count({back.b1, back.b2}))
            res.contains_torsion = false;
    }
    return res;
}

} // namespace tiling::descent
