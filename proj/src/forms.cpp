#include "cmus/forms.hpp"
#include "cmus/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cmus {

std::vector<ReducedForm> reduced_forms(const Discriminant& D) {
    std::vector<ReducedForm> out;
    const long long absd = -D.delta;
    for (long long a = 1; 3 * a * a <= absd; ++a) {
        for (long long b = -a + 1; b <= a; ++b) {
            long long num = b * b + absd; // equals 4ac when a | forms match
            if (num % (4 * a)) continue;
            long long c = num / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
            out.push_back({a, b, c});
        }
    }
    return out;
}

long long class_number(const Discriminant& D) {
    return static_cast<long long>(reduced_forms(D).size());
}

CMPoint cm_point(const ReducedForm& form, const Discriminant& D) {
    if (form.b * form.b - 4 * form.a * form.c != D.delta)
        throw InvalidArgument("form does not match discriminant " +
                              std::to_string(D.delta));
    CMPoint p{-form.b, form.a, -D.delta, form};
    if (p.num == -p.a) p.num += 2 * p.a; // Re = -1/2  ->  Re = +1/2
    if (p.on_unit_circle() && p.num < 0) p.num = -p.num; // tau -> -1/tau
    return p;
}

bool in_fundamental_domain(const CMPoint& p) {
    if (!(-p.a < p.num && p.num <= p.a)) return false;
    long long lhs = p.num * p.num + p.absd; // (2a)^2 |tau|^2
    long long rhs = 4 * p.a * p.a;
    if (lhs < rhs) return false;
    if (lhs == rhs && p.num < 0) return false;
    return true;
}

double tau_height(const CMPoint& p) {
    return 0.5 * std::log(static_cast<double>(p.source_form.c));
}

} // namespace cmus
