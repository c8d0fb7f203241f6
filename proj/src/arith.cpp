#include "tiling/arith.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace tiling::arith {

namespace {

constexpr u64 kTrialLimit = 1000000;

const std::vector<u64> &small_primes()
{
    static const std::vector<u64> primes = [] {
        std::vector<bool> composite(kTrialLimit + 1, false);
        std::vector<u64> out;
        for (u64 i = 2; i <= kTrialLimit; ++i) {
            if (composite[i])
                continue;
            out.push_back(i);
            for (u64 j = i * i; j <= kTrialLimit; j += i)
                composite[j] = true;
        }
        return out;
    }();
    return primes;
}

u64 pollard_brent(u64 n)
{
    if (n % 2 == 0)
        return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 m = 128, r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i)
                y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

void factor_rec(u64 n, std::vector<u64> &out)
{
    if (n == 1)
        return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

int jacobi(u64 a, u64 n)
{
    // n odd positive
    a %= n;
    int s = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            u64 r = n % 8;
            if (r == 3 || r == 5)
                s = -s;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            s = -s;
        a %= n;
    }
    return n == 1 ? s : 0;
}

u64 inverse_mod(u64 a, u64 m)
{
    i128 g = m, x = 0, x1 = 1, a1 = a % m;
    while (a1 != 0) {
        i128 q = g / a1;
        i128 t = g - q * a1;
        g = a1;
        a1 = t;
        t = x - q * x1;
        x = x1;
        x1 = t;
    }
    return mod(x, m);
}

} // namespace

u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m)
{
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 mod(i128 a, u64 m)
{
    i128 r = a % static_cast<i128>(m);
    if (r < 0)
        r += m;
    return static_cast<u64>(r);
}

i128 gcd128(i128 a, i128 b)
{
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool is_prime(u64 n)
{
    if (n < 2)
        return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0)
            return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (a % n == 0 || x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

std::vector<std::pair<u64, int>> factor(u64 n)
{
    std::vector<std::pair<u64, int>> res;
    for (u64 p : small_primes()) {
        if (p * p > n)
            break;
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            res.emplace_back(p, e);
        }
    }
    if (n > 1) {
        std::vector<u64> big;
        factor_rec(n, big);
        std::sort(big.begin(), big.end());
        for (u64 p : big) {
            if (!res.empty() && res.back().first == p)
                ++res.back().second;
            else
                res.emplace_back(p, 1);
        }
    }
    return res;
}

SquarefreeInteger factor_squarefree(i64 n)
{
    if (n == 0)
        throw Error(ErrorKind::ZeroArgument, "n must be nonzero");
    if (n == INT64_MIN)
        throw Error(ErrorKind::Overflow, "|n| must be below 2^63");
    SquarefreeInteger s;
    s.value = n;
    s.sign = n < 0 ? -1 : 1;
    u64 m = static_cast<u64>(n < 0 ? -n : n);
    for (auto [p, e] : factor(m)) {
        if (e > 1)
            throw Error(ErrorKind::NotSquarefree, std::to_string(p) + "^2 divides " + std::to_string(n));
        if (p == 2)
            s.has_two = true;
        else if (p == 3)
            s.has_three = true;
        else
            s.odd_primes.push_back(static_cast<i64>(p));
    }
    s.ntilde = 1;
    for (i64 p : s.odd_primes)
        s.ntilde *= p;
    s.eta = n / s.ntilde;
    return s;
}

int legendre(i64 a, i64 p)
{
    return jacobi(mod(a, static_cast<u64>(p)), static_cast<u64>(p));
}

F2 legendre_additive(i64 a, i64 p)
{
    int l = legendre(a, p);
    if (l == 0)
        throw Error(ErrorKind::NotCoprime, std::to_string(p) + " divides " + std::to_string(a));
    return l == 1 ? 0 : 1;
}

F2 jacobi_additive(i64 d, const std::vector<i64> &primes)
{
    F2 s = 0;
    for (i64 p : primes)
        s ^= legendre_additive(d, p);
    return s;
}

i64 sqrt_mod(i64 a, i64 p)
{
    u64 up = static_cast<u64>(p);
    u64 x = mod(a, up);
    if (x == 0)
        return 0;
    if (jacobi(x, up) != 1)
        throw Error(ErrorKind::NonResidue, std::to_string(a) + " mod " + std::to_string(p));
    u64 r;
    if (up % 4 == 3) {
        r = powmod(x, (up + 1) / 4, up);
    } else {
        u64 q = up - 1;
        int s = 0;
        while (q % 2 == 0) {
            q /= 2;
            ++s;
        }
        u64 z = 2;
        while (jacobi(z, up) != -1)
            ++z;
        u64 c = powmod(z, q, up);
        r = powmod(x, (q + 1) / 2, up);
        u64 t = powmod(x, q, up);
        int m = s;
        while (t != 1) {
            int i = 0;
            u64 tt = t;
            while (tt != 1) {
                tt = mulmod(tt, tt, up);
                ++i;
            }
            u64 b = c;
            for (int j = 0; j < m - i - 1; ++j)
                b = mulmod(b, b, up);
            r = mulmod(r, b, up);
            c = mulmod(b, b, up);
            t = mulmod(t, c, up);
            m = i;
        }
    }
    i64 root = static_cast<i64>(r);
    return std::min(root, p - root);
}

std::optional<u64> sqrt_unit_mod_pk(u64 u, u64 p, int k)
{
    if (k <= 0)
        return 0;
    u128 pk = 1;
    for (int i = 0; i < k; ++i)
        pk *= p;
    if (pk >> 63)
        throw Error(ErrorKind::Overflow, "p^k exceeds 63 bits");
    u64 m = static_cast<u64>(pk);
    u %= m;
    if (p == 2) {
        if (u % 2 == 0)
            return std::nullopt;
        if (k == 1)
            return 1 % m;
        if (k == 2)
            return u % 4 == 1 ? std::optional<u64>(1) : std::nullopt;
        if (u % 8 != 1)
            return std::nullopt;
        u64 r = 1;
        for (int j = 3; j < k; ++j) {
            u128 mod_next = static_cast<u128>(1) << (j + 1);
            u128 sq = static_cast<u128>(r) * r;
            if ((sq % mod_next) != (u % mod_next))
                r += static_cast<u64>(1) << (j - 1);
        }
        return r % m;
    }
    if (u % p == 0)
        return std::nullopt;
    if (jacobi(u % p, p) != 1)
        return std::nullopt;
    u64 r = static_cast<u64>(sqrt_mod(static_cast<i64>(u % p), static_cast<i64>(p)));
    // Newton iterations mod p^k; each doubles the precision.
    for (int prec = 1; prec < k; prec *= 2) {
        u64 f = (mulmod(r, r, m) + m - u) % m;
        u64 inv = inverse_mod(mulmod(2, r, m), m);
        r = (r + m - mulmod(f, inv, m)) % m;
    }
    return r;
}

int valuation(i128 x, i64 p)
{
    if (x == 0)
        throw Error(ErrorKind::ZeroArgument, "valuation of zero");
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

SquareClass square_class(i128 x, i64 place)
{
    if (x == 0)
        throw Error(ErrorKind::ZeroArgument, "square class of zero");
    SquareClass c;
    if (place == kInfinity) {
        c.unit = x < 0 ? 1 : 0;
        return c;
    }
    int v = 0;
    while (x % place == 0) {
        x /= place;
        ++v;
    }
    c.v_odd = v & 1;
    if (place == 2)
        c.unit = mod(x, 8);
    else
        c.unit = jacobi(mod(x, static_cast<u64>(place)), static_cast<u64>(place)) == 1 ? 0 : 1;
    return c;
}

SquareClass square_class_of(int v, u64 unit_residue, i64 place)
{
    SquareClass c;
    c.v_odd = v & 1;
    if (place == 2)
        c.unit = unit_residue % 8;
    else
        c.unit = jacobi(unit_residue % static_cast<u64>(place), static_cast<u64>(place)) == 1 ? 0 : 1;
    return c;
}

bool is_square_class(const SquareClass &c, i64 place)
{
    if (place == kInfinity)
        return c.unit == 0;
    if (c.v_odd)
        return false;
    return place == 2 ? c.unit == 1 : c.unit == 0;
}

F2 hilbert_classes(const SquareClass &a, const SquareClass &b, i64 place)
{
    if (place == kInfinity)
        return static_cast<F2>(a.unit & b.unit);
    if (place == 2) {
        auto eps = [](u64 u) { return static_cast<int>(((u - 1) / 2) & 1); };
        auto omega = [](u64 u) { return static_cast<int>(((u * u - 1) / 8) & 1); };
        int r = eps(a.unit) * eps(b.unit) + a.v_odd * omega(b.unit) + b.v_odd * omega(a.unit);
        return static_cast<F2>(r & 1);
    }
    int eps_p = static_cast<int>(((place - 1) / 2) & 1);
    int r = a.v_odd * b.v_odd * eps_p + b.v_odd * static_cast<int>(a.unit) + a.v_odd * static_cast<int>(b.unit);
    return static_cast<F2>(r & 1);
}

F2 hilbert_additive(i128 a, i128 b, i64 place)
{
    if (a == 0 || b == 0)
        throw Error(ErrorKind::ZeroArgument, "Hilbert symbol of zero");
    return hilbert_classes(square_class(a, place), square_class(b, place), place);
}

i64 squarefree_part(i64 x)
{
    if (x == 0)
        throw Error(ErrorKind::ZeroArgument, "squarefree part of zero");
    i64 s = x < 0 ? -1 : 1;
    for (auto [p, e] : factor(static_cast<u64>(x < 0 ? -x : x)))
        if (e % 2)
            s *= static_cast<i64>(p);
    return s;
}

std::string place_name(i64 place)
{
    return place == kInfinity ? std::string("inf") : std::to_string(place);
}

} // namespace tiling::arith
