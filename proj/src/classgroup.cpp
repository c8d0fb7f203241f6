#include "tiling/classgroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tiling/monsky.hpp"

namespace tiling::classgroup {

QuadraticFieldData quadratic_field(i64 d, const std::vector<i64> &odd_primes_of_d)
{
    if (d == 1 || d == 0)
        throw Error(ErrorKind::HypothesisFailed, "quadratic field needs d != 0, 1");
    QuadraticFieldData k;
    k.d = d;
    i64 r = ((d % 4) + 4) % 4;
    k.D = r == 1 ? d : 4 * d;
    if (r != 1)
        k.ramified_primes.push_back(2);
    for (i64 p : odd_primes_of_d)
        k.ramified_primes.push_back(p);
    return k;
}

QuadraticFieldData quadratic_field(i64 d)
{
    if (d == 1 || d == 0)
        throw Error(ErrorKind::HypothesisFailed, "quadratic field needs d != 0, 1");
    std::vector<i64> odd;
    for (auto [p, e] : arith::factor(static_cast<u64>(d < 0 ? -d : d))) {
        if (e > 1)
            throw Error(ErrorKind::NotSquarefree, std::to_string(p));
        if (p != 2)
            odd.push_back(static_cast<i64>(p));
    }
    return quadratic_field(d, odd);
}

BitMatrix redei_matrix(const QuadraticFieldData &k)
{
    std::size_t t = k.ramified_primes.size();
    BitMatrix m(t, t);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j)
            m.set(i, j, arith::hilbert_additive(k.ramified_primes[j], k.d, k.ramified_primes[i]));
    return m;
}

BitMatrix redei_matrix(i64 d) { return redei_matrix(quadratic_field(d)); }

int r2(const QuadraticFieldData &k) { return k.t_ram() - 1; }

int r4(const QuadraticFieldData &k) { return k.t_ram() - 1 - static_cast<int>(gf2::rank(redei_matrix(k))); }

int r4(i64 d) { return r4(quadratic_field(d)); }

SplittingDivisor splitting_divisor(const SquarefreeInteger &n)
{
    if (n.eta != 1)
        throw Error(ErrorKind::HypothesisFailed, "splitting divisor needs eta = 1");
    monsky::Blocks blk = monsky::build_blocks(n);
    auto ker = gf2::kernel_basis(blk.A);
    if (ker.size() != 2)
        throw Error(ErrorKind::RankMismatch, "ker A has dimension " + std::to_string(ker.size()));
    BitVector e = BitVector::ones(n.odd_primes.size());
    BitVector x1 = ker[0] == e ? ker[1] : ker[0];
    BitVector other = x1 + e;
    if (other < x1)
        x1 = other;
    SplittingDivisor s;
    s.x1 = x1;
    for (std::size_t i = 0; i < n.odd_primes.size(); ++i)
        if (x1.get(i))
            s.d_star *= n.odd_primes[i];
    return s;
}

F2 r8_decision(const SquarefreeInteger &n, i64 c)
{
    if (c == 0)
        throw Error(ErrorKind::MissingTernary, "no ternary solution supplied");
    monsky::Blocks blk = monsky::build_blocks(n);
    BitVector rc(n.odd_primes.size());
    for (std::size_t i = 0; i < n.odd_primes.size(); ++i)
        rc.set(i, arith::legendre_additive(c, n.odd_primes[i]));
    return gf2::solve(blk.A, rc).has_value() ? 1 : 0;
}

// ---- binary quadratic forms ---------------------------------------------

Form reduce(Form f)
{
    auto normalize = [](Form &g) {
        // bring b into (-a, a]
        i64 two_a = 2 * g.a;
        i64 r = ((g.b % two_a) + two_a) % two_a; // [0, 2a)
        if (r > g.a)
            r -= two_a;
        i64 s = (r - g.b) / two_a; // b' = b + 2 a s
        g.c = g.a * s * s + g.b * s + g.c;
        g.b = r;
    };
    normalize(f);
    while (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        normalize(f);
    }
    if (f.a == f.c && f.b < 0)
        f.b = -f.b;
    return f;
}

namespace {

// u a + v b = g
i64 ext_gcd(i64 a, i64 b, i64 &u, i64 &v)
{
    i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    u = old_s;
    v = old_t;
    return old_r;
}

} // namespace

Form compose(const Form &f, const Form &g, i64 D)
{
    Form f1 = f, f2 = g;
    if (f1.a > f2.a)
        std::swap(f1, f2);
    i64 s = (f1.b + f2.b) / 2;
    i64 n = f2.b - s;
    i64 y1, d;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        i64 u, v;
        d = ext_gcd(f2.a, f1.a, u, v);
        y1 = u;
    }
    i64 x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        d1 = ext_gcd(s, d, x2, y2);
        y2 = -y2;
    }
    i64 v1 = f1.a / d1, v2 = f2.a / d1;
    i128 rr = static_cast<i128>(y1) * y2 * n - static_cast<i128>(x2) * f2.c;
    i64 r = static_cast<i64>(((rr % v1) + v1) % v1);
    Form h;
    h.b = f2.b + 2 * v2 * r;
    h.a = v1 * v2;
    h.c = static_cast<i64>((static_cast<i128>(h.b) * h.b - D) / (4 * static_cast<i128>(h.a)));
    return reduce(h);
}

Form identity_form(i64 D)
{
    i64 b = ((D % 4) + 4) % 4 == 0 ? 0 : 1;
    return Form{1, b, (b * b - D) / 4};
}

std::vector<Form> reduced_forms(i64 D)
{
    if (D >= 0)
        throw Error(ErrorKind::PositiveDiscriminant, std::to_string(D));
    if (((D % 4) + 4) % 4 > 1)
        throw Error(ErrorKind::HypothesisFailed, "discriminant must be 0 or 1 mod 4");
    std::vector<Form> out;
    i64 absD = -D;
    for (i64 a = 1; 3 * a * a <= absD; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            i64 num = b * b - D;
            if (num % (4 * a) != 0)
                continue;
            i64 c = num / (4 * a);
            if (c < a)
                continue;
            if (a == c && b < 0)
                continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1)
                continue;
            out.push_back({a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

FormsClassGroup forms_class_group(i64 D)
{
    if (D >= 0)
        throw Error(ErrorKind::PositiveDiscriminant, std::to_string(D));
    auto forms = reduced_forms(D);
    FormsClassGroup g;
    g.D = D;
    g.class_number = forms.size();
    const u64 h = g.class_number;

    auto power = [&](Form x, u64 e) {
        Form r = identity_form(D);
        while (e) {
            if (e & 1)
                r = compose(r, x, D);
            x = compose(x, x, D);
            e >>= 1;
        }
        return r;
    };

    // per prime l | h, exponents of the cyclic l-factors
    std::vector<std::pair<u64, std::vector<int>>> parts;
    for (auto [l, e] : arith::factor(h)) {
        (void)e;
        std::vector<Form> cur = forms;
        std::vector<std::size_t> sizes = {cur.size()};
        while (true) {
            std::vector<Form> next;
            next.reserve(cur.size());
            for (const Form &x : cur)
                next.push_back(power(x, l));
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            if (next.size() == cur.size())
                break;
            sizes.push_back(next.size());
            cur = std::move(next);
        }
        // number of l-factors of order >= l^k
        std::vector<int> at_least;
        for (std::size_t k = 1; k < sizes.size(); ++k) {
            u64 ratio = sizes[k - 1] / sizes[k];
            int cnt = 0;
            while (ratio > 1) {
                ratio /= l;
                ++cnt;
            }
            at_least.push_back(cnt);
        }
        std::vector<int> exps; // descending
        int factors = at_least.empty() ? 0 : at_least[0];
        for (int i = 0; i < factors; ++i) {
            int ex = 0;
            for (int c : at_least)
                if (c > i)
                    ++ex;
            exps.push_back(ex);
        }
        parts.push_back({l, exps});
        if (l == 2) {
            g.r2 = at_least.size() > 0 ? at_least[0] : 0;
            g.r4 = at_least.size() > 1 ? at_least[1] : 0;
            g.r8 = at_least.size() > 2 ? at_least[2] : 0;
        }
    }
    std::size_t count = 0;
    for (auto &p : parts)
        count = std::max(count, p.second.size());
    std::vector<u64> inv(count, 1);
    for (auto &[l, exps] : parts)
        for (std::size_t i = 0; i < exps.size(); ++i)
            for (int k = 0; k < exps[i]; ++k)
                inv[i] *= l;
    std::reverse(inv.begin(), inv.end());
    g.invariant_factors = inv;
    return g;
}

bool is_fundamental_discriminant(i64 D)
{
    if (D == 0 || D == 1)
        return false;
    auto sqfree = [](i64 m) {
        for (auto [p, e] : arith::factor(static_cast<u64>(m < 0 ? -m : m)))
            if (e > 1)
                return false;
        return true;
    };
    i64 r = ((D % 4) + 4) % 4;
    if (r == 1)
        return sqfree(D);
    if (r != 0)
        return false;
    i64 m = D / 4;
    i64 rm = ((m % 4) + 4) % 4;
    return (rm == 2 || rm == 3) && sqfree(m);
}

std::vector<Discriminant> fundamental_discriminants(i64 bound, bool negative)
{
    std::vector<Discriminant> out;
    if (bound < 3)
        return out;
    std::size_t B = static_cast<std::size_t>(bound);
    std::vector<u64> spf(B + 1, 0);
    for (std::size_t i = 2; i <= B; ++i)
        if (spf[i] == 0)
            for (std::size_t j = i; j <= B; j += i)
                if (spf[j] == 0)
                    spf[j] = i;
    // odd primes of m if m is squarefree
    auto odd_primes = [&](i64 m, std::vector<i64> &ps) {
        ps.clear();
        u64 x = static_cast<u64>(m);
        u64 last = 0;
        while (x > 1) {
            u64 p = spf[x];
            if (p == last)
                return false;
            last = p;
            if (p != 2)
                ps.push_back(static_cast<i64>(p));
            x /= p;
        }
        return true;
    };
    std::vector<i64> ps;
    for (i64 a = 3; a <= bound; ++a) {
        i64 D = negative ? -a : a;
        i64 r = ((D % 4) + 4) % 4;
        if (r == 1) {
            if (odd_primes(a, ps))
                out.push_back({D, D, ps});
        } else if (r == 0) {
            i64 m = D / 4;
            i64 rm = ((m % 4) + 4) % 4;
            if ((rm == 2 || rm == 3) && odd_primes(a / 4, ps))
                out.push_back({D, m, ps});
        }
    }
    return out;
}

} // namespace tiling::classgroup
