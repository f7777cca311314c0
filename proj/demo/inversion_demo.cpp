// Builds a measure, transforms it, inverts the transform and prints what came back.

#include <iostream>

#include "stieltjesk/stieltjesk.hpp"

using namespace stieltjesk;

int main() {
    const int k = 3;
    MeasureSpec mu;
    mu.atoms.push_back({Rational(0), make_rational(1, 2)});
    mu.atoms.push_back({Rational(3), make_rational(1, 4)});
    // density 1 + t on [1, 2]
    mu.pieces.push_back({Rational(1), Rational(2), model::rat(RationalFn(QPoly{Rational(1), Rational(1)}))});
    const Rational drift = make_rational(2, 5);

    const TransformResult f = forward_transform(k, drift, mu);
    std::cout << "k = " << k << ", drift = " << drift << ", atoms at 0 (1/2) and 3 (1/4), density 1+t on [1,2]\n\n";
    std::cout << "x\tf(x) quadrature\tf(x) closed form\n";
    for (double x : {0.1, 1.0, 1.5, 3.0, 10.0}) std::cout << x << "\t" << f(x) << "\t" << f.exact_form->eval(x) << "\n";

    const RoundTripReport rt = roundtrip_check(k, drift, mu);
    const ExactInversion& inv = rt.recovered;
    std::cout << "\nrecovered drift:        " << inv.drift.str() << "\n";
    std::cout << "recovered atom at 0:    " << inv.atom_at_zero.str() << "\n";
    for (const auto& [t, m] : inv.atoms) std::cout << "recovered atom at " << t << ":    " << m.str() << "\n";
    std::cout << "recovered density:      " << inv.density.str() << "\n";
    std::cout << "exact round trip:       " << (rt.all() ? "yes" : "no") << "\n\n";

    // Inversion of a function given only as a model.
    const Model g = parse_model("rat(1;1+x)");
    const InversionResult r = invert(g, 2);
    std::cout << "1/(1+x) against Phi_1: density " << to_string(r.density) << "\n";
    return rt.all() ? 0 : 1;
}
