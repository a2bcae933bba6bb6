#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sakr/corpus.hpp"
#include "sakr/errors.hpp"

using namespace sakr;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = fs::temp_directory_path() / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("combined_text joins non-empty fields with single spaces") {
    CHECK(combine_fields("X", {"y", "z"}, "W") == "X y z W");
    CHECK(combine_fields("X", {}, "") == "X");
    CHECK(combine_fields("", {"a"}, "b") == "a b");
    CHECK(combine_fields("", {"", "k"}, "") == "k");
}

TEST_CASE("load_corpus jsonl populates combined_text in file order") {
    TempFile f("corpus_ok.jsonl",
               R"({"id":"a","headline":"X","keywords":["y","z"],"abstract":"W"})"
               "\n"
               R"({"id":"b","headline":"X","keywords":[],"abstract":""})"
               "\n");
    auto docs = load_corpus(f.path.string(), CorpusFormat::jsonl);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "a");
    CHECK(docs[0].combined_text == "X y z W");
    CHECK(docs[1].combined_text == "X");
}

TEST_CASE("load_corpus errors carry line numbers") {
    SUBCASE("duplicate id") {
        TempFile f("corpus_dup.jsonl",
                   R"({"id":"a","headline":"X"})" "\n"
                   R"({"id":"a","headline":"Y"})" "\n");
        CHECK_THROWS_AS(load_corpus(f.path.string(), CorpusFormat::jsonl),
                        DuplicateId);
    }
    SUBCASE("missing id") {
        TempFile f("corpus_noid.jsonl", R"({"headline":"X"})" "\n");
        CHECK_THROWS_AS(load_corpus(f.path.string(), CorpusFormat::jsonl),
                        MissingId);
    }
    SUBCASE("malformed json") {
        TempFile f("corpus_bad.jsonl", "{not json\n");
        try {
            load_corpus(f.path.string(), CorpusFormat::jsonl);
            FAIL("expected MalformedRecord");
        } catch (const MalformedRecord& e) {
            CHECK(std::string(e.what()).find(":1") != std::string::npos);
        }
    }
    SUBCASE("record with no text at all") {
        TempFile f("corpus_empty.jsonl", R"({"id":"a"})" "\n");
        CHECK_THROWS_AS(load_corpus(f.path.string(), CorpusFormat::jsonl),
                        MalformedRecord);
    }
}

TEST_CASE("load_corpus csv splits keywords on semicolons") {
    TempFile f("corpus.csv",
               "id,headline,keywords,abstract\n"
               "a,\"Hello, World\",k1;k2,Abs\n"
               "b,H2,,\n");
    auto docs = load_corpus(f.path.string(), CorpusFormat::csv);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].headline == "Hello, World");
    CHECK(docs[0].keywords == std::vector<std::string>{"k1", "k2"});
    CHECK(docs[0].combined_text == "Hello, World k1 k2 Abs");
    CHECK(docs[1].combined_text == "H2");
}

TEST_CASE("load_corpus is deterministic over identical bytes") {
    TempFile f("corpus_det.jsonl",
               R"({"id":"a","headline":"one two"})" "\n"
               R"({"id":"b","abstract":"three"})" "\n");
    auto first = load_corpus(f.path.string(), CorpusFormat::jsonl);
    auto second = load_corpus(f.path.string(), CorpusFormat::jsonl);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].doc_id == second[i].doc_id);
        CHECK(first[i].combined_text == second[i].combined_text);
    }
}

TEST_CASE("load_qrels parses judged and relevant sets") {
    TempFile f("qrels.tsv", "q1\td1\t1\nq1\td2\t0\nq2\td1\t1\n");
    auto qrels = load_qrels(f.path.string());
    REQUIRE(qrels.size() == 2);
    CHECK(qrels.at("q1").relevant == std::set<std::string>{"d1"});
    CHECK(qrels.at("q1").judged == std::set<std::string>{"d1", "d2"});
    CHECK(qrels.at("q2").relevant == std::set<std::string>{"d1"});
}

TEST_CASE("load_qrels rejects bad labels and malformed lines") {
    SUBCASE("empty file") {
        TempFile f("qrels_empty.tsv", "");
        CHECK(load_qrels(f.path.string()).empty());
    }
    SUBCASE("label outside {0,1}") {
        TempFile f("qrels_bad.tsv", "q1\td1\t2\n");
        CHECK_THROWS_AS(load_qrels(f.path.string()), BadLabel);
    }
    SUBCASE("missing tab") {
        TempFile f("qrels_mal.tsv", "q1 d1 1\n");
        CHECK_THROWS_AS(load_qrels(f.path.string()), MalformedLine);
    }
}

TEST_CASE("chunk_stream sizes follow the ceiling rule") {
    auto make_docs = [](std::size_t n) {
        std::vector<Document> docs(n);
        for (std::size_t i = 0; i < n; ++i) {
            docs[i].doc_id = "d" + std::to_string(i);
        }
        return docs;
    };

    auto chunks = chunk_stream(make_docs(5), 2);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].docs.size() == 2);
    CHECK(chunks[1].docs.size() == 2);
    CHECK(chunks[2].docs.size() == 1);
    CHECK(chunks[2].seq_no == 2);

    CHECK(chunk_stream(make_docs(4), 4).size() == 1);
    CHECK(chunk_stream({}, 3).empty());
    CHECK_THROWS_AS(chunk_stream(make_docs(1), 0), ZeroChunkSize);
}

TEST_CASE("chunking round-trips for every chunk size") {
    std::vector<Document> docs(23);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        docs[i].doc_id = "d" + std::to_string(i);
    }
    for (std::size_t c = 1; c <= 25; ++c) {
        auto chunks = chunk_stream(docs, c);
        std::vector<std::string> flattened;
        for (std::size_t k = 0; k < chunks.size(); ++k) {
            CHECK(chunks[k].seq_no == k);
            if (k + 1 < chunks.size()) CHECK(chunks[k].docs.size() == c);
            for (const auto& d : chunks[k].docs) flattened.push_back(d.doc_id);
        }
        REQUIRE(flattened.size() == docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            CHECK(flattened[i] == docs[i].doc_id);
        }
    }
}
