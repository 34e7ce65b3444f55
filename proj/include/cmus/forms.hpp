#ifndef CMUS_FORMS_HPP
#define CMUS_FORMS_HPP

#include "cmus/discriminant.hpp"

#include <cmath>
#include <vector>

namespace cmus {

// Primitive reduced integral binary quadratic form a x^2 + b xy + c y^2:
// b^2 - 4ac = delta, gcd(a,b,c) = 1, -a < b <= a <= c, b >= 0 when a = c.
struct ReducedForm {
    long long a, b, c;
};

// The root tau = (num + i sqrt(absd)) / (2a) of its form, normalized so
// that Re tau in (-1/2, 1/2], |tau| >= 1, and Re tau >= 0 when |tau| = 1.
// num, a, absd keep the point exact; re()/im() are for diagnostics.
struct CMPoint {
    long long num;
    long long a;
    long long absd;
    ReducedForm source_form;

    bool on_unit_circle() const { return num * num + absd == 4 * a * a; }
    double re() const { return static_cast<double>(num) / (2.0 * a); }
    double im() const { return std::sqrt(static_cast<double>(absd)) / (2.0 * a); }
};

// The complete list of primitive reduced forms of discriminant delta, in
// increasing (a, b) order; its length is the class number h(delta).
std::vector<ReducedForm> reduced_forms(const Discriminant& D);

long long class_number(const Discriminant& D);

CMPoint cm_point(const ReducedForm& form, const Discriminant& D);

// Exact membership test for the region Re in (-1/2, 1/2], |tau| >= 1,
// Re >= 0 on |tau| = 1, using only integer arithmetic.
bool in_fundamental_domain(const CMPoint& p);

// Exact Weil height h(tau) = (1/2) log c: the minimal polynomial
// a T^2 + b T + c is primitive and both roots have modulus sqrt(c/a) >= 1,
// so its Mahler measure is a * (c/a) = c.
double tau_height(const CMPoint& p);

} // namespace cmus

#endif
