#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "glduality/mesh.hpp"
#include "glduality/rng.hpp"

using namespace glduality;

TEST_CASE("build_mesh basic spacing") {
    Mesh m1 = build_mesh(1, 3, 1.0);
    CHECK(m1.h == Catch::Approx(0.25));
    CHECK(m1.size() == 3);

    Mesh m2 = build_mesh(2, 4, 2.0);
    CHECK(m2.h == Catch::Approx(0.4));
    CHECK(m2.size() == 16);

    Mesh m3 = build_mesh(1, 1, 1.0);
    CHECK(m3.h == Catch::Approx(0.5));
    CHECK(m3.weight * m3.size() == Catch::Approx(1.0));
}

TEST_CASE("build_mesh rejects bad arguments") {
    CHECK_THROWS_AS(build_mesh(3, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1, 4, -1.0), std::invalid_argument);
}

TEST_CASE("quadrature weights integrate constants exactly") {
    for (int dim : {1, 2}) {
        for (int n : {1, 3, 7, 16}) {
            Mesh m = build_mesh(dim, n, dim == 1 ? 1.0 : 2.5);
            Field one(m, 1.0);
            CHECK(integrate(one) == Catch::Approx(m.measure()).epsilon(1e-15));
        }
    }
}

TEST_CASE("inner product of constant one fields equals the measure") {
    Mesh m = build_mesh(1, 3, 1.0);
    Field u(m, 1.0);
    CHECK(inner(u, u) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inner is bilinear and matches a high-precision re-summation") {
    Mesh m = build_mesh(1, 17, 1.0);
    CounterRng rng(7, 0);
    Field u = gaussian_field(m, rng);
    Field v = gaussian_field(m, rng);
    Field zero(m);
    CHECK(inner(u, zero) == 0.0);

    long double acc = 0.0L;
    for (int i = 0; i < m.size(); ++i)
        acc += static_cast<long double>(u[i]) * static_cast<long double>(v[i]);
    acc *= static_cast<long double>(m.weight);
    CHECK(inner(u, v) == Catch::Approx(static_cast<double>(acc)).margin(1e-14));

    CHECK(inner(u, v) == Catch::Approx(inner(v, u)).margin(1e-15));
    Field w = u + v;
    CHECK(inner(w, v) == Catch::Approx(inner(u, v) + inner(v, v)).margin(1e-12));
}

TEST_CASE("mesh mismatch is rejected") {
    Mesh a = build_mesh(1, 4, 1.0);
    Mesh b = build_mesh(1, 5, 1.0);
    Field u(a), v(b);
    CHECK_THROWS_AS(inner(u, v), std::invalid_argument);
}

TEST_CASE("field csv round trip") {
    CounterRng rng(123, 1);
    for (int dim : {1, 2}) {
        Mesh m = build_mesh(dim, dim == 1 ? 9 : 4, 1.7);
        Field f = gaussian_field(m, rng);
        std::ostringstream os;
        write_field_csv(os, f);
        std::istringstream is(os.str());
        Field g = read_field_csv(is, m);
        for (int i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
    }
}

TEST_CASE("field csv header check") {
    Mesh m = build_mesh(1, 2, 1.0);
    std::istringstream is("x,y,u\n0.1,0.2,3\n");
    CHECK_THROWS(read_field_csv(is, m));
}
