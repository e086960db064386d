#include <cstdlib>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "bottleneck/road_io.hpp"

using namespace bottleneck;

namespace {

std::filesystem::path fixture(const char* name) {
    if (const char* dir = std::getenv("BOTTLENECK_FIXTURES")) {
        return std::filesystem::path(dir) / name;
    }
    return std::filesystem::path("tests/fixtures") / name;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr const char* kHeader5 =
    "edge_id,from_node,to_node,length_m,speed_limit,"
    "mean_h1,var_h1,mean_h2,var_h2,mean_h3,var_h3,mean_h4,var_h4,mean_h5,var_h5\n";

}  // namespace

TEST_CASE("loads the two-edge fixture") {
    const RoadNetworkData data = load_road_network(fixture("two_edge.csv"));
    CHECK(data.graph.node_count() == 3);
    CHECK(data.graph.edge_count() == 2);
    CHECK(data.d == 5);
    CHECK(data.node_names == std::vector<std::string>{"a", "b", "c"});
    CHECK(data.edge_names == std::vector<std::string>{"e1", "e2"});
    CHECK(data.graph.from(0) == 0);
    CHECK(data.graph.to(0) == 1);
    CHECK(data.graph.length_m(0) == 120.5);
    CHECK(data.speed_limits[1] == 30.0);
    CHECK(data.context_means(0, 0) == 12.1);
    CHECK(data.context_vars(4, 1) == 1.3);
}

TEST_CASE("round trip is byte identical after one canonicalization") {
    const auto out1 = temp_file("two_edge_roundtrip1.csv");
    const auto out2 = temp_file("two_edge_roundtrip2.csv");
    save_road_network(load_road_network(fixture("two_edge.csv")), out1);
    save_road_network(load_road_network(out1), out2);
    const std::string first = read_file(out1);
    CHECK(!first.empty());
    CHECK(first == read_file(out2));
}

TEST_CASE("reference to an undeclared node is an inconsistency") {
    const RoadNetworkData data = load_road_network(fixture("two_edge.csv"));
    CHECK_THROWS_AS(make_scenario(data, "a", "zzz", 1.0), InconsistencyError);
    CHECK_THROWS_AS(make_scenario(data, "zzz", "c", 1.0), InconsistencyError);
    CHECK_THROWS_AS(data.node_index("nowhere"), InconsistencyError);
}

TEST_CASE("edge row with an empty endpoint is an inconsistency") {
    const auto path = temp_file("missing_endpoint.csv");
    write_file(path, std::string(kHeader5) +
                         "e1,a,,10,50,1,1,1,1,1,1,1,1,1,1\n");
    CHECK_THROWS_AS(load_road_network(path), InconsistencyError);
}

TEST_CASE("duplicate edge ids are an inconsistency") {
    const auto path = temp_file("dup_edge.csv");
    write_file(path, std::string(kHeader5) +
                         "e1,a,b,10,50,1,1,1,1,1,1,1,1,1,1\n"
                         "e1,b,c,10,50,1,1,1,1,1,1,1,1,1,1\n");
    CHECK_THROWS_AS(load_road_network(path), InconsistencyError);
}

TEST_CASE("parse errors carry the line number") {
    const auto path = temp_file("bad_float.csv");
    write_file(path, std::string(kHeader5) +
                         "e1,a,b,10,50,1,1,1,1,1,1,1,1,1,1\n"
                         "e2,b,c,oops,50,1,1,1,1,1,1,1,1,1,1\n");
    try {
        load_road_network(path);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.line == 3);
        CHECK(std::string(err.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("field count mismatches and bad headers are parse errors") {
    const auto short_row = temp_file("short_row.csv");
    write_file(short_row, std::string(kHeader5) + "e1,a,b,10,50,1,1\n");
    CHECK_THROWS_AS(load_road_network(short_row), ParseError);

    const auto bad_header = temp_file("bad_header.csv");
    write_file(bad_header, "edge,src,dst,len,limit,mean_h1,var_h1\ne1,a,b,10,50,1,1\n");
    CHECK_THROWS_AS(load_road_network(bad_header), ParseError);

    const auto odd_stats = temp_file("odd_stats.csv");
    write_file(odd_stats,
               "edge_id,from_node,to_node,length_m,speed_limit,mean_h1,var_h1,mean_h2\n"
               "e1,a,b,10,50,1,1,1\n");
    CHECK_THROWS_AS(load_road_network(odd_stats), ParseError);

    const auto negative_var = temp_file("negative_var.csv");
    write_file(negative_var,
               "edge_id,from_node,to_node,length_m,speed_limit,mean_h1,var_h1\n"
               "e1,a,b,10,50,1,-2\n");
    CHECK_THROWS_AS(load_road_network(negative_var), ParseError);

    const auto zero_length = temp_file("zero_length.csv");
    write_file(zero_length,
               "edge_id,from_node,to_node,length_m,speed_limit,mean_h1,var_h1\n"
               "e1,a,b,0,50,1,1\n");
    CHECK_THROWS_AS(load_road_network(zero_length), ParseError);

    CHECK_THROWS_AS(load_road_network(temp_file("does_not_exist.csv")), ParseError);
}

TEST_CASE("make_scenario applies the default prior rule and noise variance") {
    const RoadNetworkData data = load_road_network(fixture("two_edge.csv"));
    const Scenario scenario = make_scenario(data, "a", "c", 1.0);

    CHECK(scenario.source == 0);
    CHECK(scenario.target == 2);
    CHECK(scenario.d == 5);

    const double lambda0 = 120.5 * 1e-2;
    CHECK(scenario.prior_means[0] == Eigen::VectorXd::Constant(5, lambda0));
    CHECK(scenario.prior_covs[0] == 5.0 * lambda0 * Eigen::MatrixXd::Identity(5, 5));
    CHECK(scenario.edge_models[0].noise_var == 1.0);
    CHECK(scenario.edge_models[0].context_means(0) == 12.1);

    CHECK_THROWS_AS(make_scenario(data, "a", "a", 1.0), InconsistencyError);
    CHECK_THROWS_AS(make_scenario(data, "c", "a", 1.0), InconsistencyError);  // unreachable
    CHECK_THROWS_AS(make_scenario(data, "a", "c", 0.0), std::invalid_argument);
}

TEST_CASE("sidecar files parse as flat key=value") {
    const auto sidecar = load_sidecar(fixture("two_edge.csv.scenario"));
    CHECK(sidecar.at("source") == "a");
    CHECK(sidecar.at("target") == "c");
    CHECK(sidecar.at("noise_var") == "1");

    const auto bad = temp_file("bad_sidecar.scenario");
    write_file(bad, "source\n");
    CHECK_THROWS_AS(load_sidecar(bad), ParseError);
}

TEST_CASE("synthetic scenarios round trip through the road schema") {
    const Scenario scenario = generate_synthetic(3, 3, 2, 17);
    const auto csv = temp_file("synthetic_roundtrip.csv");
    save_synthetic_as_road(scenario, csv);

    const RoadNetworkData loaded = load_road_network(csv);
    CHECK(loaded.graph.node_count() == scenario.graph.node_count());
    CHECK(loaded.graph.edge_count() == scenario.graph.edge_count());
    CHECK(loaded.d == 2);
    for (EdgeId e = 0; e < loaded.graph.edge_count(); ++e) {
        CHECK(loaded.graph.from(e) == scenario.graph.from(e));
        CHECK(loaded.graph.to(e) == scenario.graph.to(e));
        CHECK(loaded.graph.length_m(e) == scenario.graph.length_m(e));
        CHECK(loaded.context_means.col(e) ==
              scenario.edge_models[static_cast<std::size_t>(e)].context_means);
    }

    const auto sidecar = load_sidecar(sidecar_path(csv));
    CHECK(sidecar.at("source") == "n0");
    CHECK(sidecar.at("target") == "n8");
}
