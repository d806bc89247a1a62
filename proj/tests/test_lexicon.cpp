#include <gtest/gtest.h>

#include <sstream>

#include "sensoryt5/dataset.hpp"
#include "sensoryt5/lexicon.hpp"
#include "sensoryt5/random.hpp"

using namespace sensoryt5;

namespace {

SensoryVector vec(std::initializer_list<double> v) {
    SensoryVector s;
    std::size_t i = 0;
    for (double x : v) s[i++] = x;
    return s;
}

Lexicon random_lexicon(Rng& rng, std::size_t n, const std::string& prefix) {
    Lexicon lex;
    for (std::size_t i = 0; i < n; ++i) {
        SensoryVector v;
        for (auto& x : v.values) x = uniform(rng, 0.0, 5.0);
        lex.insert(prefix + std::to_string(i), v);
    }
    return lex;
}

}  // namespace

TEST(ParseLexicon, EmptyInputGivesEmptyLexicon) {
    EXPECT_EQ(parse_lexicon("").size(), 0u);
    EXPECT_EQ(parse_lexicon("\n\n").size(), 0u);
}

TEST(ParseLexicon, ZeroRowIsAllZeroVector) {
    auto lex = parse_lexicon("calm\t0.0\t0.0\t0.0\t0.0\t0.0\t0.0\n");
    ASSERT_EQ(lex.size(), 1u);
    EXPECT_EQ(*lex.lookup("calm"), SensoryVector{});
    EXPECT_EQ(lex.find("calm")->source, EntrySource::original);
}

TEST(ParseLexicon, HeaderIsDetectedAndCommaDelimiterWorks) {
    auto lex = parse_lexicon("word,auditory,gustatory,haptic,interoceptive,olfactory,visual\n"
                             "sweet,1,4.5,1,2,3,2\n",
                             {','});
    ASSERT_EQ(lex.size(), 1u);
    EXPECT_DOUBLE_EQ((*lex.lookup("sweet"))[1], 4.5);
}

TEST(ParseLexicon, WideHeaderIsMappedByColumnName) {
    auto lex = parse_lexicon("Word\tAuditory.mean\tGustatory.mean\tHaptic.mean\tInteroceptive.mean\t"
                             "Olfactory.mean\tVisual.mean\tFoot_leg.mean\n"
                             "A CAPPELLA\t4.3\t0.1\t0.2\t0.3\t0.4\t1.5\t2.0\n");
    ASSERT_EQ(lex.size(), 1u);
    const auto v = *lex.lookup("a cappella");
    EXPECT_DOUBLE_EQ(v[0], 4.3);
    EXPECT_DOUBLE_EQ(v[5], 1.5);
}

TEST(ParseLexicon, MalformedRowsNameTheLine) {
    auto expect_line = [](const std::string& text, std::size_t line) {
        try {
            parse_lexicon(text);
            FAIL() << "expected ParseError for: " << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_line("a\t1\t1\t1\t1\t1\t1\nb\t1\t1\t1\n", 2);              // column count
    expect_line("a\t1\t1\t1\t1\t1\t1\nb\t1\tx\t1\t1\t1\t1\n", 2);     // non-numeric
    expect_line("a\t1\t1\t1\t1\t1\t5.01\n", 1);                        // out of range
    expect_line("a\t1\t1\t-0.5\t1\t1\t1\n", 1);
    expect_line("a\t1\t1\t1\t1\t1\t1\tmaybe\n", 1);                    // bad source tag
}

TEST(ParseLexicon, DuplicatesKeepFirstAndAreCounted) {
    auto lex = parse_lexicon("Sweet\t1\t4\t1\t1\t1\t1\nsweet\t0\t0\t0\t0\t0\t0\nsweet!\t2\t2\t2\t2\t2\t2\n");
    EXPECT_EQ(lex.size(), 1u);
    EXPECT_EQ(lex.duplicate_rows(), 2u);
    EXPECT_DOUBLE_EQ((*lex.lookup("sweet"))[1], 4.0);
}

TEST(Lookup, NormalizesCaseAndEdgePunctuation) {
    Lexicon lex;
    lex.insert("sweet", vec({1, 4.5, 1, 0, 2, 1}));
    EXPECT_EQ(lex.lookup("Sweet"), lex.lookup("sweet"));
    EXPECT_TRUE(lex.lookup("\"SWEET!\"").has_value());
    EXPECT_FALSE(lex.lookup("sour").has_value());
    EXPECT_FALSE(lex.lookup("...").has_value());
}

TEST(Lookup, MergedPredictionsCarryTheirSource) {
    Lexicon base, preds;
    base.insert("sweet", vec({1, 4.5, 1, 0, 2, 1}));
    preds.insert("candy", vec({0.5, 4, 2, 1, 2, 3}), EntrySource::predicted);
    auto merged = merge(base, preds);
    const auto* e = merged.find("Candy");
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->source, EntrySource::predicted);
    EXPECT_EQ(e->vector, vec({0.5, 4, 2, 1, 2, 3}));
    EXPECT_EQ(merged.find("sweet")->source, EntrySource::original);
}

TEST(Merge, IdentityPrecedenceAndDisjointSize) {
    Rng rng(1);
    auto a = random_lexicon(rng, 2, "a");
    auto b = random_lexicon(rng, 3, "b");
    EXPECT_EQ(merge(a, Lexicon{}), a);
    EXPECT_EQ(merge(a, b).size(), 5u);

    Lexicon base, other;
    base.insert("sweet", vec({1, 4.5, 1, 0, 2, 1}));
    other.insert("sweet", vec({0, 0, 0, 0, 0, 0}), EntrySource::predicted);
    auto m = merge(base, other);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_EQ(*m.lookup("sweet"), vec({1, 4.5, 1, 0, 2, 1}));
    EXPECT_EQ(m.find("sweet")->source, EntrySource::original);
}

TEST(Histogram, HandCountedGustatoryBins) {
    Lexicon lex;
    lex.insert("a", vec({0, 0.1, 0, 0, 0, 0}));
    lex.insert("b", vec({0, 0.4, 0, 0, 0, 0}));
    lex.insert("c", vec({0, 4.9, 0, 0, 0, 0}));
    auto h = histogram(lex, 1, 5);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 0, 0, 0, 1}));
    EXPECT_EQ(h.bin_edges, (std::vector<double>{0, 1, 2, 3, 4, 5}));
}

TEST(Histogram, EdgeValuesAndErrors) {
    Lexicon lex;
    lex.insert("top", vec({5, 5, 5, 5, 5, 5}));
    lex.insert("edge", vec({1, 1, 1, 1, 1, 1}));
    auto h = histogram(lex, 0, 5);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{0, 1, 0, 0, 1}));
    EXPECT_EQ(histogram(Lexicon{}, 2, 4).counts, (std::vector<std::size_t>(4, 0)));
    EXPECT_THROW(histogram(lex, 6, 5), Error);
    EXPECT_THROW(histogram(lex, 0, 0), Error);
}

TEST(Histogram, EveryDimensionSumsToLexiconSize) {
    Rng rng(2);
    auto lex = random_lexicon(rng, 257, "w");
    for (std::size_t bins : {1u, 3u, 10u, 64u}) {
        for (std::size_t d = 0; d < kSensoryDims; ++d) {
            auto h = histogram(lex, d, bins);
            std::size_t total = 0;
            for (auto c : h.counts) total += c;
            EXPECT_EQ(total, lex.size());
            for (std::size_t i = 1; i < h.bin_edges.size(); ++i) EXPECT_LT(h.bin_edges[i - 1], h.bin_edges[i]);
        }
    }
}

TEST(Coverage, HandCountedFixture) {
    Lexicon lex;
    lex.insert("sweet", vec({1, 4, 1, 1, 1, 1}));
    lex.insert("cake", vec({1, 4, 2, 1, 3, 3}));
    std::vector<Document> corpus{tokenize("sweet cake"), tokenize("zorp cake")};
    auto r = coverage(lex, corpus);
    EXPECT_EQ(r.total_tokens, 4u);
    EXPECT_EQ(r.covered_tokens, 3u);
    EXPECT_DOUBLE_EQ(r.coverage_pct, 75.0);
    ASSERT_EQ(r.per_document.size(), 2u);
    EXPECT_DOUBLE_EQ(r.per_document[0].second, 100.0);
    EXPECT_DOUBLE_EQ(r.per_document[1].second, 50.0);

    // Type level: {sweet, cake, zorp} -> 2 of 3.
    auto t = coverage(lex, corpus, true);
    EXPECT_EQ(t.total_tokens, 3u);
    EXPECT_EQ(t.covered_tokens, 2u);
}

TEST(Coverage, EmptyCorpusIsZero) {
    Lexicon lex;
    lex.insert("sweet", vec({1, 4, 1, 1, 1, 1}));
    auto r = coverage(lex, {});
    EXPECT_EQ(r.total_tokens, 0u);
    EXPECT_EQ(r.coverage_pct, 0.0);
}

TEST(Coverage, MergeNeverLowersCoverage) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto base = random_lexicon(rng, 1 + uniform_index(rng, 20), "w");
        auto extra = random_lexicon(rng, uniform_index(rng, 40), "w");
        std::vector<Document> corpus(1 + uniform_index(rng, 5));
        for (auto& doc : corpus)
            for (std::size_t i = uniform_index(rng, 12); i > 0; --i) doc.push_back("w" + std::to_string(uniform_index(rng, 50)));
        for (bool types : {false, true}) {
            EXPECT_GE(coverage(merge(base, extra), corpus, types).coverage_pct, coverage(base, corpus, types).coverage_pct);
        }
    }
}

TEST(Serialization, RoundTripIsIdentical) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        Lexicon lex = random_lexicon(rng, 30, "w");
        lex.insert("edge", vec({0, 5, 0, 5, 0, 5}), EntrySource::predicted);
        for (char delim : {'\t', ','}) {
            std::ostringstream out;
            write_lexicon(out, lex, {delim});
            std::istringstream in(out.str());
            EXPECT_EQ(parse_lexicon(in, {delim}), lex);
        }
    }
}
