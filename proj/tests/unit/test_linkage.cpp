#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "elink/linkage.hpp"
#include "support/random_models.hpp"

using namespace elink;

namespace {

const char* kToyA =
    "IDENTIFIER,UNIT,NAME,ADDRESS,AGE\n"
    "P1,a1,John A Smith,16 Main Street,16\n"
    "P2,a2,Javier Martinez,49 E Applecross Road,33\n"
    "P3,a3,Gillian Jones,645 Reading Aev,22\n";
const char* kToyB =
    "IDENTIFIER,UNIT,NAME,ADDRESS,AGE\n"
    "P1,b1,J H Smith,16 Main St,17\n"
    "P2,b2,Haveir Marteenez,49 Aplecross Raod,36\n"
    "P4,b3,Jilliam Brown,123 Norcross Blvd,43\n";

LinkageSchema toy_schema() {
    LinkageSchema s;
    Comparator jw{ComparatorKind::jaro_winkler};
    Comparator age{ComparatorKind::absolute_difference_normalized};
    s.compared_fields = {{"NAME", jw}, {"ADDRESS", jw}, {"AGE", age}};
    return s;
}

ElectreModel toy_model(double lambda = 0.5) {
    std::vector<Criterion> cs(3);
    for (auto& c : cs) {
        c.indifference = 0.05;
        c.preference = 0.15;
    }
    return ElectreModel(cs, ProfileSet({{0.5, 0.5, 0.5}, {0.8, 0.8, 0.8}}), lambda);
}

}  // namespace

TEST(BuildPairs, ToyTablesGiveNinePairsRowMajor) {
    const auto s = toy_schema();
    const auto a = parse_table(kToyA, s, "A"), b = parse_table(kToyB, s, "B");
    const auto pairs = build_pairs(a, b, s);
    ASSERT_EQ(pairs.size(), 9u);
    EXPECT_EQ(pairs[0].id_a, "P1");
    EXPECT_EQ(pairs[0].id_b, "P1");
    EXPECT_EQ(pairs[1].id_b, "P2");
    EXPECT_EQ(pairs[3].id_a, "P2");
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : pairs) {
        ASSERT_EQ(p.performances.size(), 3u);
        for (double g : p.performances) {
            ASSERT_GE(g, 0.0);
            ASSERT_LE(g, 1.0);
        }
        ASSERT_TRUE(seen.insert({p.id_a, p.id_b}).second);
    }
    EXPECT_DOUBLE_EQ(pairs[0].performances[2], 0.9);
    EXPECT_DOUBLE_EQ(pairs[4].performances[2], 0.7);
    EXPECT_EQ(true_links(a, b), (LinkSet{{"P1", "P1"}, {"P2", "P2"}}));
}

TEST(BuildPairs, EmptySideGivesNoPairs) {
    const auto s = toy_schema();
    const auto a = parse_table("IDENTIFIER,NAME,ADDRESS,AGE\n", s, "A"), b = parse_table(kToyB, s, "B");
    EXPECT_TRUE(build_pairs(a, b, s).empty());
}

TEST(BuildPairs, IdenticalRecordsScoreOne) {
    const auto s = toy_schema();
    const auto a = parse_table(kToyA, s, "A");
    const auto pairs = build_pairs(a, a, s);
    for (const auto& p : pairs)
        if (p.id_a == p.id_b)
            for (double g : p.performances) EXPECT_EQ(g, 1.0);
}

TEST(BuildPairs, NonNumericAgeNamesTheRecord) {
    const auto s = toy_schema();
    const auto a = parse_table("IDENTIFIER,NAME,ADDRESS,AGE\nX9,A,B,old\n", s, "A");
    const auto b = parse_table(kToyB, s, "B");
    try {
        build_pairs(a, b, s);
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("X9"), std::string::npos);
    }
}

TEST(ComparisonSpace, AtMatchesMaterialize) {
    const auto s = toy_schema();
    const auto a = parse_table(kToyA, s, "A"), b = parse_table(kToyB, s, "B");
    const ComparisonSpace space(a, b, s);
    const auto all = space.materialize();
    for (std::size_t k = 0; k < space.size(); ++k) EXPECT_EQ(space.at(k), all[k]);
}

TEST(LabelPairs, TwoClassAndBanded) {
    std::vector<ComparisonVector> pairs{{"1", "1", {1.0}, {}}, {"1", "2", {0.9}, {}}, {"2", "1", {0.1}, {}}};
    label_pairs(pairs, {{"1", "1"}}, LabelPolicy::two_class);
    EXPECT_EQ(pairs[0].label, kMatch);
    EXPECT_EQ(pairs[1].label, kNonmatch);
    EXPECT_EQ(pairs[2].label, kNonmatch);

    FsModel fs;
    fs.fields = {{"x", 0.9, 0.1, 0.88}};
    // agree: log2 9; disagree: -log2 9.
    fs.lower = -1.0;
    fs.upper = 5.0;
    label_pairs(pairs, {{"1", "1"}}, LabelPolicy::banded, &fs);
    EXPECT_EQ(pairs[0].label, kMatch);
    EXPECT_EQ(pairs[1].label, kPotentialMatch);
    EXPECT_EQ(pairs[2].label, kNonmatch);
    EXPECT_THROW(label_pairs(pairs, {}, LabelPolicy::banded, nullptr), UsageError);
}

TEST(LabelPolicy, Parse) {
    EXPECT_EQ(parse_label_policy("banded"), LabelPolicy::banded);
    EXPECT_EQ(parse_label_policy(to_string(LabelPolicy::two_class)), LabelPolicy::two_class);
    EXPECT_THROW(parse_label_policy("three_class"), UsageError);
}

TEST(ClassifyPairs, ExtremesAndAudit) {
    const auto m = toy_model();
    const std::vector<ComparisonVector> pairs{{"a", "b", {1.0, 1.0, 1.0}, {}}, {"c", "d", {0.0, 0.0, 0.0}, {}}};
    const auto out = classify_pairs(pairs, m, Procedure::pessimistic);
    EXPECT_EQ(out[0].category, kMatch);
    EXPECT_EQ(out[1].category, kNonmatch);
    ASSERT_EQ(out[0].sigma.size(), 2u);
    EXPECT_EQ(out[0].sigma, credibilities(m, pairs[0].performances));
    const std::vector<ComparisonVector> bad{{"a", "b", {1.0}, {}}};
    EXPECT_THROW(classify_pairs(bad, m, Procedure::pessimistic), UsageError);
}

TEST(ClassifyPairs, PureAndMonotone) {
    testsupport::Gen g(41);
    const auto m = toy_model(0.7);
    for (int k = 0; k < 1000; ++k) {
        ComparisonVector v{"a", "b", {g.uniform(0, 1), g.uniform(0, 1), g.uniform(0, 1)}, {}};
        const auto first = classify_pair(v, m, Procedure::pessimistic);
        ASSERT_EQ(classify_pair(v, m, Procedure::pessimistic).category, first.category);
        auto up = v;
        for (auto& x : up.performances) x = std::min(1.0, x + g.uniform(0, 0.3));
        ASSERT_GE(classify_pair(up, m, Procedure::pessimistic).category, first.category);
    }
}

TEST(ClassifiedFile, RoundTripIsLossless) {
    testsupport::Gen g(42);
    const auto m = toy_model();
    std::vector<ComparisonVector> pairs;
    for (int k = 0; k < 50; ++k) {
        ComparisonVector v{"a" + std::to_string(k), "b,\"" + std::to_string(k), {g.uniform(0, 1), g.uniform(0, 1), 1.0 / 3}, {}};
        if (k % 3 != 0) v.label = k % 2 ? kMatch : kNonmatch;
        pairs.push_back(v);
    }
    const auto out = classify_pairs(pairs, m, Procedure::optimistic);
    std::ostringstream s;
    write_classified(s, {"NAME", "ADDRESS", "AGE"}, out, m.profile_count());
    EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "id_a,id_b,NAME,ADDRESS,AGE,sigma_b1,sigma_b2,category,truth");
    const auto back = read_classified(s.str());
    ASSERT_EQ(back.size(), out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        EXPECT_EQ(back[k].pair, out[k].pair);
        EXPECT_EQ(back[k].sigma, out[k].sigma);
        EXPECT_EQ(back[k].category, out[k].category);
    }
}

TEST(ClassifiedFile, BadRowsReportLine) {
    const std::string text = "id_a,id_b,X,sigma_b1,category,truth\na,b,0.5,0.5,2,\na,c,0.5,zz,1,3\n";
    try {
        read_classified(text, "c.csv");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_THROW(read_classified("id_a,id_b\n"), DataError);
}
