#include <doctest.h>

#include "caselink/case_link.hpp"
#include "caselink/coinjoin.hpp"
#include "caselink/errors.hpp"
#include "caselink/ingest.hpp"
#include "support.hpp"

using namespace caselink;
using testing::make_case;
using testing::tx;

namespace {

struct Desk {
  testing::DeskFixture fx = testing::load_desk();
  Ledger ledger{fx.transactions};
  std::vector<CoinJoinVerdict> verdicts = classify_all(ledger);
  EntityPartition partition = EntityPartition::build(ledger, verdicts);
  EntityGraph graph = EntityGraph::build(partition, verdicts, fx.tags);
  std::vector<CaseRecord> active = filter_active_cases(fx.cases, ledger).active;
};

std::string id(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "BY1234-%06d-22/1", n);
  return buf;
}

std::string fid(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "BY1000-%06d-22/0", n);
  return buf;
}

}  // namespace

TEST_SUITE("case_link") {
  TEST_CASE("level names") {
    CHECK(parse_link_level("collector") == LinkLevel::collector);
    CHECK(to_string(LinkLevel::entity) == "entity");
    CHECK_THROWS_AS(parse_link_level("wallet"), InvalidArgument);
  }

  TEST_CASE("shared address joins two cases") {
    const std::vector<CaseRecord> cases{make_case(1, {"x"}), make_case(2, {"x"}), make_case(3, {"y"})};
    const auto c = link_by_address(cases);
    REQUIRE(c.clusters.size() == 2);
    CHECK(c.clusters[0].case_ids == std::vector<std::string>{fid(1), fid(2)});
    REQUIRE(c.clusters[0].shared_evidence.size() == 1);
    CHECK(c.clusters[0].shared_evidence[0].to_string() == "address:x");
    CHECK(c.singleton_count() == 1);
    CHECK(c.cluster_of(fid(2)) == 0u);
    CHECK_FALSE(c.cluster_of("nope"));
  }

  TEST_CASE("disjoint cases stay singletons") {
    std::vector<CaseRecord> cases;
    for (int i = 1; i <= 6; ++i) cases.push_back(make_case(i, {"addr" + std::to_string(i)}));
    const auto c = link_by_address(cases);
    CHECK(c.clusters.size() == 6);
    CHECK(c.singleton_count() == 6);
    CHECK(linkage_rate(c) == 0.0);
  }

  TEST_CASE("victim annotations never link") {
    const std::vector<CaseRecord> cases{make_case(1, {"a"}, {"shared"}), make_case(2, {"b"}, {"shared"}),
                                        make_case(3, {"c"}, {"a"})};
    CHECK(link_by_address(cases).clusters.size() == 3);
  }

  TEST_CASE("co-spent addresses merge at entity level") {
    const Ledger ledger({tx("t1", 0, {{"a1", 5}, {"a2", 5}}, {{"z", 10}})});
    const auto verdicts = classify_all(ledger);
    const auto partition = EntityPartition::build(ledger, verdicts);
    const std::vector<CaseRecord> cases{make_case(1, {"a1"}), make_case(2, {"a2"})};
    CHECK(link_by_address(cases).clusters.size() == 2);
    const auto e = link_by_entity(cases, partition);
    REQUIRE(e.clusters.size() == 1);
    CHECK(e.clusters[0].shared_evidence.back().to_string() == "entity:a1");
  }

  TEST_CASE("service entities do not link") {
    const Ledger ledger({tx("t1", 0, {{"d1", 5}, {"d2", 5}, {"hot", 5}}, {{"cold", 15}})});
    const auto verdicts = classify_all(ledger);
    const auto partition = EntityPartition::build(ledger, verdicts);
    const std::vector<AttributionTag> tags{{"hot", "Exchange", TagCategory::exchange, true}};
    const auto graph = EntityGraph::build(partition, verdicts, tags);
    const std::vector<CaseRecord> cases{make_case(1, {"d1"}), make_case(2, {"d2"})};
    const auto c = link_by_entity(cases, partition, &graph);
    CHECK(c.clusters.size() == 2);
    CHECK(c.clusters[0].contains_service_evidence);
    // without the graph nothing is known to be a service
    CHECK(link_by_entity(cases, partition).clusters.size() == 1);
  }

  TEST_CASE("collector joins entity clusters") {
    const Ledger ledger({tx("t1", 0, {{"a", 5}}, {{"col", 5}}), tx("t2", 0, {{"b", 5}}, {{"col", 5}}),
                         tx("t3", 0, {{"c", 5}}, {{"xch", 5}}), tx("t4", 0, {{"d", 5}}, {{"xch", 5}})});
    const auto verdicts = classify_all(ledger);
    const auto partition = EntityPartition::build(ledger, verdicts);
    const std::vector<AttributionTag> tags{{"xch", "Exchange", TagCategory::exchange, true}};
    const auto graph = EntityGraph::build(partition, verdicts, tags);
    const std::vector<CaseRecord> cases{make_case(1, {"a"}), make_case(2, {"b"}), make_case(3, {"c"}),
                                        make_case(4, {"d"})};
    CHECK(link_by_entity(cases, partition, &graph).clusters.size() == 4);
    const auto c = link_by_collector(cases, graph);
    REQUIRE(c.clusters.size() == 3);
    CHECK(c.clusters[0].case_ids == std::vector<std::string>{fid(1), fid(2)});
    CHECK(c.clusters[0].shared_evidence.back().to_string() == "collector:col");
  }

  TEST_CASE("desk fixture at every level") {
    const Desk d;
    REQUIRE(d.active.size() == 6);
    CaseLinker linker(d.active, &d.partition, &d.graph);

    const auto a = linker.link(LinkLevel::address);
    CHECK(testing::grouping(a) == testing::Grouping{{id(1), id(5)}, {id(2)}, {id(3)}, {id(4)}, {id(7)}});
    CHECK(a.clusters[0].inflow == 1999500 + 1000000 + 599500);

    const auto e = linker.link(LinkLevel::entity);
    CHECK(testing::grouping(e) == testing::Grouping{{id(1), id(2), id(5)}, {id(3)}, {id(4)}, {id(7)}});
    CHECK(e.clusters[0].inflow == 5098500);
    const auto c4 = *e.cluster_of(id(4));
    CHECK(e.clusters[c4].contains_service_evidence);
    CHECK(e.clusters[c4].inflow == 0);

    const auto c = linker.link(LinkLevel::collector);
    CHECK(testing::grouping(c) == testing::Grouping{{id(1), id(2), id(3), id(5)}, {id(4)}, {id(7)}});
    CHECK(c.clusters[0].inflow == 9097500);
    REQUIRE(linker.collectors().size() == 1);
    CHECK(d.partition.representative(linker.collectors()[0].collector) == "k1");
    CHECK(linker.collectors()[0].sources.size() == 2);

    CHECK(linkage_rate(a) == doctest::Approx(2.0 / 6.0));
    CHECK(linkage_rate(e) == doctest::Approx(3.0 / 6.0));
    CHECK(linkage_rate(c) == doctest::Approx(4.0 / 6.0));
  }

  TEST_CASE("collector source threshold") {
    const Desk d;
    CHECK(CaseLinker(d.active, &d.partition, &d.graph, {2}).link(LinkLevel::collector).clusters.size() == 3);
    CHECK(CaseLinker(d.active, &d.partition, &d.graph, {3}).link(LinkLevel::collector).clusters.size() == 4);
  }

  TEST_CASE("evidence accumulates across levels") {
    const Desk d;
    CaseLinker linker(d.active, &d.partition, &d.graph);
    const auto i = *linker.index_of(id(2));
    const auto a = linker.evidence(i, LinkLevel::address);
    const auto e = linker.evidence(i, LinkLevel::entity);
    const auto c = linker.evidence(i, LinkLevel::collector);
    CHECK(std::includes(e.begin(), e.end(), a.begin(), a.end()));
    CHECK(std::includes(c.begin(), c.end(), e.begin(), e.end()));
    CHECK(c.size() == 3);
  }

  TEST_CASE("linkage rate arithmetic") {
    CHECK(linkage_rate(1150, 35) == doctest::Approx(0.9696).epsilon(0.0001));
    CHECK(linkage_rate(34, 20) == doctest::Approx(0.4118).epsilon(0.0001));
    CHECK(linkage_rate(0, 0) == 0.0);
    CHECK(linkage_rate(5, 5) == 0.0);
  }

  TEST_CASE("breakdown recounts clusters") {
    const Desk d;
    const auto e = CaseLinker(d.active, &d.partition, &d.graph).link(LinkLevel::entity);
    const auto rows = cluster_breakdown(e);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].cluster_size == 1);
    CHECK(rows[0].cluster_count == 3);
    CHECK(rows[0].inflow == 3999000);
    CHECK(rows[0].service_flag);
    CHECK(rows[1].cluster_size == 3);
    CHECK(rows[1].cluster_count == 1);
    CHECK(rows[1].inflow == 5098500);
    CHECK_FALSE(rows[1].service_flag);

    CaseClustering one;
    one.clusters.push_back(CaseCluster{{"x"}, {}, 42, true});
    const auto single = cluster_breakdown(one);
    REQUIRE(single.size() == 1);
    CHECK(single[0].cluster_count == 1);
    CHECK(single[0].inflow == 42);
  }

  TEST_CASE("clusters ordered by size then first case id") {
    const std::vector<CaseRecord> cases{make_case(5, {"s"}), make_case(4, {"p"}), make_case(3, {"q"}),
                                        make_case(2, {"p"}), make_case(1, {"t"})};
    const auto c = link_by_address(cases);
    REQUIRE(c.clusters.size() == 4);
    CHECK(c.clusters[0].case_ids == std::vector<std::string>{fid(2), fid(4)});
    CHECK(c.clusters[1].case_ids[0] == fid(1));
    CHECK(c.clusters[3].case_ids[0] == fid(5));
  }
}
