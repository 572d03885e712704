#include <catch2/catch_amalgamated.hpp>

#include "akx/io.hpp"
#include "oracles.hpp"

using namespace akx;

TEST_CASE("algebra elements survive a JSON round trip") {
    Rng rng(401);
    const std::vector<AlgebraDescriptor> ds = {
        AlgebraDescriptor::matrix(3), AlgebraDescriptor::quaternion(),
        AlgebraDescriptor::grassmann(2), AlgebraDescriptor::weighted_seq(5, 3.0)};
    for (const auto& d : ds) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto el = random_element(d, rng);
            const auto back = element_from_json(nlohmann::json::parse(element_to_json(el).dump()));
            REQUIRE(back.descriptor == el.descriptor);
            REQUIRE(oracles::max_coord_dev(back, el) == 0.0);
        }
    }
}

TEST_CASE("element schema rejects malformed input") {
    CHECK_THROWS_AS(element_from_json(nlohmann::json::parse(
                        R"({"kind":"matrix","n":2,"coords":[[1,0]]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(element_from_json(nlohmann::json::parse(
                        R"({"kind":"matrix","n":2,"extra":1,"coords":[[1,0],[0,0],[0,0],[1,0]]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(descriptor_from_json(nlohmann::json::parse(R"({"kind":"octonion"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(descriptor_from_json(nlohmann::json::parse(
                        R"({"kind":"quaternion","field":"complex"})")),
                    std::invalid_argument);
}

TEST_CASE("function specs: presets and inline coefficient arrays") {
    const auto e = function_from_json(nlohmann::json("exp"));
    CHECK(std::isinf(e.radius));
    CHECK(e.c(0) == cplx{1.0, 0.0});

    const auto inline_fn = function_from_json(nlohmann::json::parse(
        R"({"coeffs": [[1,0],[0,1],[0.5,0]], "radius": 2.5})"));
    CHECK(inline_fn.radius == 2.5);
    CHECK(inline_fn.c(1) == cplx{0.0, 1.0});

    const auto entire = function_from_json(nlohmann::json::parse(
        R"({"coeffs": [[1,0]], "radius": "inf"})"));
    CHECK(std::isinf(entire.radius));

    CHECK_THROWS_AS(function_from_json(nlohmann::json("sinh")), std::invalid_argument);
    CHECK_THROWS_AS(function_from_json(nlohmann::json::parse(R"({"radius": 1})")),
                    std::invalid_argument);
}

TEST_CASE("kernel specs: presets and inline Hermitian grids") {
    const auto fock = kernel_from_json(nlohmann::json("fock"));
    CHECK(fock.at(2, 2) == cplx{0.5, 0.0});

    const auto inline_k = kernel_from_json(nlohmann::json::parse(
        R"({"p":1, "c": [[[1,0],[0,-0.5]],[[0,0.5],[2,0]]], "radius": "inf"})"));
    CHECK(inline_k.deg == 1);
    CHECK(inline_k.at(1, 0) == cplx{0.0, 0.5});

    // non-Hermitian grids are rejected
    CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(
                        R"({"c": [[[1,0],[1,0]],[[0,0],[2,0]]]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernel_from_json(nlohmann::json("gauss")), std::invalid_argument);
}

TEST_CASE("gram CSV layout") {
    Mat g(2, 2);
    g(0, 0) = 1.0;
    g(0, 1) = cplx{0.25, -0.5};
    g(1, 0) = cplx{0.25, 0.5};
    g(1, 1) = 2.0;
    std::ostringstream os;
    mat_to_csv(g, os);
    const auto text = os.str();
    CHECK(text.rfind("row,re0,im0,re1,im1\n", 0) == 0);
    CHECK(text.find("0,1,0,0.25,-0.5\n") != std::string::npos);
    CHECK(text.find("1,0.25,0.5,2,0\n") != std::string::npos);
}
