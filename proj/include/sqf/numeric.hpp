#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sqf {

using i128 = __int128;

inline constexpr i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline constexpr i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string to_string(i128 v);
i128 parse_i128(const std::string& s);

// Floats in machine-readable output carry 12 significant digits: short enough
// to stay readable, precise enough that write -> read -> write is stable.
std::string format_g12(double v);

// Reduced fraction on 128-bit parts. Wide enough for phi*T - total^2 at the
// largest supported sieve sizes (|num| < 1e24 << 2^127).
struct Rat128 {
    i128 num = 0;
    i128 den = 1;

    Rat128() = default;
    Rat128(i128 n, i128 d) : num(n), den(d) {
        if (den == 0) throw std::domain_error("Rat128: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            den = 1;
        } else {
            i128 g = gcd128(num, den);
            num /= g;
            den /= g;
        }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return to_string(num) + "/" + to_string(den); }

    friend bool operator==(const Rat128& a, const Rat128& b) {
        return a.num == b.num && a.den == b.den;
    }
};

// Neumaier-compensated accumulator. Summation order is fixed by the caller,
// so results are bitwise deterministic.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline int64_t mod_floor(int64_t v, int64_t m) {
    int64_t r = v % m;
    return r < 0 ? r + m : r;
}

int64_t mod_pow(int64_t base, uint64_t exp, int64_t mod);
int64_t mod_inverse(int64_t a, int64_t m);

int resolve_threads(int requested);

// Runs body(i) for i in [0, n) split into contiguous chunks, one per worker.
// Each index is processed exactly once; callers write to disjoint slots, so
// output does not depend on the thread count.
void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& body);

}  // namespace sqf
