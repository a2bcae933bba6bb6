#include "sakr/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sakr/errors.hpp"

namespace sakr {

namespace {

std::string at_line(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    return in;
}

// Minimal RFC 4180 row parser: quoted cells, doubled quotes, commas.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::vector<std::string> split_keywords_cell(const std::string& cell) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : cell) {
        if (c == ';') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<Document> load_jsonl(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw MalformedRecord("invalid JSON at " + at_line(path, lineno));
        }
        Document doc;
        if (!rec.contains("id") || !rec["id"].is_string() ||
            rec["id"].get<std::string>().empty()) {
            throw MissingId("record without id at " + at_line(path, lineno));
        }
        doc.doc_id = rec["id"].get<std::string>();
        if (rec.contains("headline")) {
            if (!rec["headline"].is_string()) {
                throw MalformedRecord("headline not a string at " +
                                      at_line(path, lineno));
            }
            doc.headline = rec["headline"].get<std::string>();
        }
        if (rec.contains("keywords")) {
            if (!rec["keywords"].is_array()) {
                throw MalformedRecord("keywords not an array at " +
                                      at_line(path, lineno));
            }
            for (const auto& kw : rec["keywords"]) {
                if (!kw.is_string()) {
                    throw MalformedRecord("keyword not a string at " +
                                          at_line(path, lineno));
                }
                doc.keywords.push_back(kw.get<std::string>());
            }
        }
        if (rec.contains("abstract")) {
            if (!rec["abstract"].is_string()) {
                throw MalformedRecord("abstract not a string at " +
                                      at_line(path, lineno));
            }
            doc.abstract = rec["abstract"].get<std::string>();
        }
        if (!seen.insert(doc.doc_id).second) {
            throw DuplicateId("id \"" + doc.doc_id + "\" repeated at " +
                              at_line(path, lineno));
        }
        doc.combined_text = combine_fields(doc.headline, doc.keywords, doc.abstract);
        if (doc.combined_text.empty()) {
            throw MalformedRecord("no non-empty text field at " +
                                  at_line(path, lineno));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<Document> load_csv(const std::string& path) {
    auto in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) return {};
    strip_cr(line);
    auto header = split_csv_row(line);
    int col_id = -1, col_headline = -1, col_keywords = -1, col_abstract = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "id") col_id = static_cast<int>(i);
        else if (header[i] == "headline") col_headline = static_cast<int>(i);
        else if (header[i] == "keywords") col_keywords = static_cast<int>(i);
        else if (header[i] == "abstract") col_abstract = static_cast<int>(i);
    }
    if (col_id < 0) throw MalformedRecord("CSV header lacks an id column: " + path);

    auto cell = [](const std::vector<std::string>& row, int col) -> std::string {
        if (col < 0 || static_cast<std::size_t>(col) >= row.size()) return {};
        return row[static_cast<std::size_t>(col)];
    };

    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto row = split_csv_row(line);
        Document doc;
        doc.doc_id = cell(row, col_id);
        if (doc.doc_id.empty()) {
            throw MissingId("row without id at " + at_line(path, lineno));
        }
        if (!seen.insert(doc.doc_id).second) {
            throw DuplicateId("id \"" + doc.doc_id + "\" repeated at " +
                              at_line(path, lineno));
        }
        doc.headline = cell(row, col_headline);
        doc.keywords = split_keywords_cell(cell(row, col_keywords));
        doc.abstract = cell(row, col_abstract);
        doc.combined_text = combine_fields(doc.headline, doc.keywords, doc.abstract);
        if (doc.combined_text.empty()) {
            throw MalformedRecord("no non-empty text field at " +
                                  at_line(path, lineno));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace

std::string combine_fields(const std::string& headline,
                           const std::vector<std::string>& keywords,
                           const std::string& abstract) {
    std::string out;
    auto append = [&out](const std::string& part) {
        if (part.empty()) return;
        if (!out.empty()) out += ' ';
        out += part;
    };
    append(headline);
    for (const auto& kw : keywords) append(kw);
    append(abstract);
    return out;
}

std::vector<Document> load_corpus(const std::string& path, CorpusFormat format) {
    return format == CorpusFormat::jsonl ? load_jsonl(path) : load_csv(path);
}

std::map<std::string, QrelSet> load_qrels(const std::string& path) {
    auto in = open_or_throw(path);
    std::map<std::string, QrelSet> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw MalformedLine("expected query_id<TAB>doc_id<TAB>label at " +
                                at_line(path, lineno));
        }
        std::string query_id = line.substr(0, t1);
        std::string doc_id = line.substr(t1 + 1, t2 - t1 - 1);
        std::string label = line.substr(t2 + 1);
        if (query_id.empty() || doc_id.empty()) {
            throw MalformedLine("empty field at " + at_line(path, lineno));
        }
        if (label != "0" && label != "1") {
            throw BadLabel("label \"" + label + "\" at " + at_line(path, lineno));
        }
        QrelSet& q = out[query_id];
        q.query_id = query_id;
        q.judged.insert(doc_id);
        if (label == "1") q.relevant.insert(doc_id);
    }
    return out;
}

std::vector<StreamChunk> chunk_stream(const std::vector<Document>& docs,
                                      std::size_t chunk_size) {
    if (chunk_size == 0) throw ZeroChunkSize("chunk_size must be >= 1");
    std::vector<StreamChunk> chunks;
    chunks.reserve((docs.size() + chunk_size - 1) / chunk_size);
    for (std::size_t begin = 0; begin < docs.size(); begin += chunk_size) {
        StreamChunk chunk;
        chunk.seq_no = chunks.size();
        std::size_t end = std::min(begin + chunk_size, docs.size());
        chunk.docs.assign(docs.begin() + static_cast<std::ptrdiff_t>(begin),
                          docs.begin() + static_cast<std::ptrdiff_t>(end));
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

}  // namespace sakr
