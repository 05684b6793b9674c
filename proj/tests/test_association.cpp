#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "reach/association.hpp"
#include "reach/error.hpp"

using namespace reach;

namespace {

GwrNetwork fixed_net(VectorSet weights) {
    const int n = static_cast<int>(weights.size());
    const int dim = weights.dim();
    return GwrNetwork::from_parts(dim, GwrParams{}, 1, std::move(weights), std::vector<double>(n, 1.0), {});
}

} // namespace

TEST_CASE("N identical pairs accumulate N * alpha * a_s * a_m") {
    const auto a = fixed_net(VectorSet(1, {{0.0}, {5.0}}));
    const auto b = fixed_net(VectorSet(2, {{0.0, 0.0}, {3.0, 4.0}}));

    // Inputs on the neurons: both activities are exactly 1.
    for (int n : {1, 7, 100}) {
        VectorSet xa(1), xb(2);
        for (int i = 0; i < n; ++i) {
            xa.push_back(std::vector<double>{5.0});
            xb.push_back(std::vector<double>{0.0, 0.0});
        }
        const auto t = build_associations(a, b, xa, xb, 0.5);
        CHECK(t.weight(1, 0) == n * 0.5 * 1.0 * 1.0);
        CHECK(t.entry_count() == 1);
    }

    // Off-neuron inputs: activities exp(-d).
    VectorSet xa(1), xb(2);
    for (int i = 0; i < 12; ++i) {
        xa.push_back(std::vector<double>{4.5});
        xb.push_back(std::vector<double>{0.3, 0.4});
    }
    const auto t = build_associations(a, b, xa, xb, 0.5);
    CHECK(t.weight(1, 0) == doctest::Approx(12 * 0.5 * std::exp(-0.5) * std::exp(-0.5)).epsilon(1e-12));
    CHECK(t.weight(0, 0) == 0.0);
}

TEST_CASE("strongest partner is invariant to the Hebbian rate") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    VectorSet wa(1), wb(1), xa(1), xb(1);
    for (int i = 0; i < 20; ++i) {
        wa.push_back(std::vector<double>{u(rng)});
        wb.push_back(std::vector<double>{u(rng)});
    }
    for (int i = 0; i < 500; ++i) {
        const double v = u(rng);
        xa.push_back(std::vector<double>{v});
        xb.push_back(std::vector<double>{10.0 - v + 0.3 * u(rng)});
    }
    const auto a = fixed_net(wa);
    const auto b = fixed_net(wb);
    const auto t1 = build_associations(a, b, xa, xb, 0.5);
    const auto t2 = build_associations(a, b, xa, xb, 3.75);
    for (int i = 0; i < a.size(); ++i) CHECK(t1.strongest(i, Direction::AtoB) == t2.strongest(i, Direction::AtoB));
    for (int j = 0; j < b.size(); ++j) CHECK(t1.strongest(j, Direction::BtoA) == t2.strongest(j, Direction::BtoA));
}

TEST_CASE("building and recalling do not modify the networks") {
    const auto a = fixed_net(VectorSet(1, {{0.0}, {1.0}, {2.0}}));
    const auto b = fixed_net(VectorSet(1, {{10.0}, {11.0}}));
    const auto a_copy = a;
    const auto b_copy = b;
    const VectorSet xa(1, {{0.1}, {1.9}, {1.1}});
    const VectorSet xb(1, {{10.2}, {10.9}, {10.8}});
    const auto t = build_associations(a, b, xa, xb);
    const auto w = recall(t, a, b, std::vector<double>{2.0}, Direction::AtoB);
    CHECK(w[0] == 11.0);
    const auto back = recall(t, b, a, std::vector<double>{10.0}, Direction::BtoA);
    CHECK(back[0] == 0.0);
    CHECK(a == a_copy);
    CHECK(b == b_copy);
}

TEST_CASE("ties go to the lowest index and missing associations raise") {
    AssociationTable t("a", 3, "b", 4);
    t.strengthen(0, 3, 0.5, 0.5);
    t.strengthen(0, 1, 0.5, 0.5);
    t.strengthen(2, 1, 1.0, 1.0);
    CHECK(t.strongest(0, Direction::AtoB) == 1);
    CHECK(t.strongest(1, Direction::BtoA) == 2);
    CHECK_FALSE(t.strongest(1, Direction::AtoB).has_value());
    CHECK(t.connected_a() == 2);
    CHECK(t.connected_b() == 2);

    CHECK_THROWS_AS(t.strengthen(3, 0, 0.5, 0.5), InvalidArgument);
    CHECK_THROWS_AS(t.strengthen(0, 0, 0.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(t.strengthen(0, 0, 0.5, 1.5), InvalidArgument);

    const auto a = fixed_net(VectorSet(1, {{0.0}, {1.0}, {2.0}}));
    const auto b = fixed_net(VectorSet(1, {{0.0}, {1.0}, {2.0}, {3.0}}));
    try {
        recall(t, a, b, std::vector<double>{1.0}, Direction::AtoB);
        FAIL("expected NoAssociationError");
    } catch (const NoAssociationError& e) {
        CHECK(e.neuron() == 1);
    }
    CHECK_THROWS_AS(recall(t, b, a, std::vector<double>{1.0}, Direction::AtoB), InvalidArgument);
}

TEST_CASE("tables round-trip through the binary format") {
    AssociationTable t("gaze/centroid", 5, "gaze/head", 3, 0.25);
    t.strengthen(4, 2, 0.3, 0.9);
    t.strengthen(0, 0, 1.0, 0.1);
    t.strengthen(4, 2, 0.3, 0.9);
    std::stringstream buf;
    t.save(buf);
    const auto back = AssociationTable::load(buf);
    CHECK(back == t);
    CHECK(back.id_a() == "gaze/centroid");
    CHECK(back.alpha() == 0.25);

    std::stringstream bad(std::string("HEBBXXX\0garbage", 15));
    CHECK_THROWS_AS(AssociationTable::load(bad), FormatError);
}
