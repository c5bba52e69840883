#include "factgpt/bm25.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "factgpt/errors.hpp"

namespace factgpt {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::io_failure, std::string("bad number in index file for ") + what);
    }
}

} // namespace

Bm25Index Bm25Index::build(const std::vector<Post>& posts, const Bm25Config& cfg) {
    if (posts.empty()) raise(ErrorCode::empty_corpus, "cannot index an empty post corpus");
    if (!(cfg.k1 > 0.0) || cfg.b < 0.0 || cfg.b > 1.0)
        raise(ErrorCode::config_invalid, "BM25 requires k1 > 0 and b in [0, 1]");

    Bm25Index index;
    index.cfg_ = cfg;

    index.docs_.reserve(posts.size());
    for (const auto& post : posts) {
        const auto tokens = tokenize(post.text);
        index.docs_.push_back({post.id, static_cast<std::uint32_t>(tokens.size()), post.date});
    }
    std::sort(index.docs_.begin(), index.docs_.end(),
              [](const DocInfo& a, const DocInfo& b) { return a.id < b.id; });
    for (std::uint32_t i = 0; i < index.docs_.size(); ++i) {
        if (!index.doc_ids_.emplace(index.docs_[i].id, i).second)
            raise(ErrorCode::duplicate_id, "duplicate post id: " + index.docs_[i].id);
    }

    for (const auto& post : posts) {
        const std::uint32_t doc = index.doc_ids_.at(post.id);
        std::map<std::string, std::uint32_t> tf;
        for (const auto& token : tokenize(post.text)) ++tf[token];
        for (const auto& [term, count] : tf) index.postings_[term].push_back({doc, count});
    }
    for (auto& [term, list] : index.postings_) {
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    }

    std::uint64_t total_len = 0;
    for (const auto& d : index.docs_) total_len += d.length;
    index.avg_doc_len_ = static_cast<double>(total_len) / static_cast<double>(index.docs_.size());
    return index;
}

double Bm25Index::idf(std::size_t df) const {
    const double n = static_cast<double>(df);
    const double N = static_cast<double>(docs_.size());
    return std::log(1.0 + (N - n + 0.5) / (n + 0.5));
}

double Bm25Index::term_score(double idf_value, double tf, double doc_len) const {
    const double denom =
        tf + cfg_.k1 * (1.0 - cfg_.b + cfg_.b * doc_len / avg_doc_len_);
    return idf_value * tf * (cfg_.k1 + 1.0) / denom;
}

double Bm25Index::score(const TokenSeq& query, const std::string& post_id) const {
    const auto it = doc_ids_.find(post_id);
    if (it == doc_ids_.end()) raise(ErrorCode::unknown_doc, "no such post in index: " + post_id);
    const std::uint32_t doc = it->second;
    const double doc_len = docs_[doc].length;

    double total = 0.0;
    for (const auto& token : query) {
        const auto pit = postings_.find(token);
        if (pit == postings_.end()) continue;
        const auto& list = pit->second;
        const auto lit = std::lower_bound(
            list.begin(), list.end(), doc,
            [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (lit == list.end() || lit->doc != doc) continue;
        total += term_score(idf(list.size()), lit->tf, doc_len);
    }
    return total;
}

std::vector<ScoredCandidate> Bm25Index::retrieve(const TokenSeq& query, CivilDate center,
                                                 int window_days, int k) const {
    if (k < 1) raise(ErrorCode::config_invalid, "retrieve requires k >= 1");
    if (window_days < 0) raise(ErrorCode::config_invalid, "retrieve requires window_days >= 0");

    std::vector<char> eligible(docs_.size(), 0);
    for (std::size_t i = 0; i < docs_.size(); ++i)
        eligible[i] = days_between(docs_[i].date, center) <= window_days;

    // Term-at-a-time accumulation in query order keeps per-document addend
    // order identical to score(), so results match it bit for bit.
    std::vector<double> acc(docs_.size(), 0.0);
    for (const auto& token : query) {
        const auto pit = postings_.find(token);
        if (pit == postings_.end()) continue;
        const double idf_value = idf(pit->second.size());
        for (const auto& posting : pit->second) {
            if (!eligible[posting.doc]) continue;
            acc[posting.doc] += term_score(idf_value, posting.tf, docs_[posting.doc].length);
        }
    }

    std::vector<ScoredCandidate> results;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (acc[i] > 0.0) results.push_back({docs_[i].id, acc[i]});
    }
    std::sort(results.begin(), results.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.bm25_score != b.bm25_score) return a.bm25_score > b.bm25_score;
        return a.post_id < b.post_id;
    });
    if (results.size() > static_cast<std::size_t>(k)) results.resize(static_cast<std::size_t>(k));
    return results;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());

    // Layout: header lines (magic, k1, b, avgdl, docs count), one doc line
    // per post (id length date, sorted by id), then "postings M" and one line
    // per term: term df id:tf... with ids in ascending order.
    out << "factgpt-bm25 v1\n";
    out << "k1 " << format_double(cfg_.k1) << '\n';
    out << "b " << format_double(cfg_.b) << '\n';
    out << "avgdl " << format_double(avg_doc_len_) << '\n';
    out << "docs " << docs_.size() << '\n';
    for (const auto& d : docs_)
        out << d.id << ' ' << d.length << ' ' << format_iso_date(d.date) << '\n';
    out << "postings " << postings_.size() << '\n';
    for (const auto& [term, list] : postings_) {
        out << term << ' ' << list.size();
        for (const auto& p : list) out << ' ' << docs_[p.doc].id << ':' << p.tf;
        out << '\n';
    }
    if (!out) raise(ErrorCode::io_failure, "failed writing " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open index " + path.string());

    const auto fail = [&](const std::string& why) -> void {
        raise(ErrorCode::io_failure, path.string() + ": " + why);
    };

    std::string line;
    if (!std::getline(in, line) || line != "factgpt-bm25 v1") fail("bad magic header");

    const auto read_kv = [&](const char* key) -> std::string {
        if (!std::getline(in, line)) fail(std::string("missing header line ") + key);
        std::istringstream ss(line);
        std::string k, v;
        ss >> k >> v;
        if (k != key || v.empty()) fail(std::string("expected header line ") + key);
        return v;
    };

    Bm25Index index;
    index.cfg_.k1 = parse_double(read_kv("k1"), "k1");
    index.cfg_.b = parse_double(read_kv("b"), "b");
    index.avg_doc_len_ = parse_double(read_kv("avgdl"), "avgdl");
    std::size_t doc_count = 0;
    {
        const auto value = read_kv("docs");
        const auto* first = value.data();
        const auto* last = value.data() + value.size();
        if (std::from_chars(first, last, doc_count).ptr != last) fail("bad doc count");
    }

    index.docs_.reserve(doc_count);
    for (std::size_t i = 0; i < doc_count; ++i) {
        if (!std::getline(in, line)) fail("truncated doc table");
        std::istringstream ss(line);
        std::string id, date_str;
        std::uint32_t length = 0;
        if (!(ss >> id >> length >> date_str)) fail("bad doc line: " + line);
        const auto date = parse_iso_date(date_str);
        if (!date) fail("bad doc date: " + date_str);
        index.docs_.push_back({id, length, *date});
        if (!index.doc_ids_.emplace(id, static_cast<std::uint32_t>(i)).second)
            fail("duplicate doc id: " + id);
        if (i > 0 && !(index.docs_[i - 1].id < id)) fail("doc table not sorted by id");
    }

    if (!std::getline(in, line)) fail("missing postings header");
    std::size_t term_count = 0;
    {
        std::istringstream ss(line);
        std::string k;
        if (!(ss >> k >> term_count) || k != "postings") fail("bad postings header");
    }
    for (std::size_t t = 0; t < term_count; ++t) {
        if (!std::getline(in, line)) fail("truncated postings");
        std::istringstream ss(line);
        std::string term;
        std::size_t df = 0;
        if (!(ss >> term >> df)) fail("bad posting line: " + line);
        auto& list = index.postings_[term];
        list.reserve(df);
        std::string cell;
        while (ss >> cell) {
            const auto colon = cell.rfind(':');
            if (colon == std::string::npos || colon == 0) fail("bad posting cell: " + cell);
            const std::string id = cell.substr(0, colon);
            std::uint32_t tf = 0;
            const auto* first = cell.data() + colon + 1;
            const auto* last = cell.data() + cell.size();
            if (std::from_chars(first, last, tf).ptr != last || tf == 0)
                fail("bad posting tf: " + cell);
            const auto dit = index.doc_ids_.find(id);
            if (dit == index.doc_ids_.end()) fail("posting references unknown doc: " + id);
            list.push_back({dit->second, tf});
        }
        if (list.size() != df) fail("posting df mismatch for term: " + term);
        for (std::size_t i = 1; i < list.size(); ++i)
            if (!(list[i - 1].doc < list[i].doc)) fail("posting list not sorted: " + term);
    }

    if (index.docs_.empty()) fail("index holds no documents");
    return index;
}

std::vector<ScoredCandidate> retrieve_candidates(const Bm25Index& index, const Claim& claim,
                                                 int window_days, int k) {
    return index.retrieve(tokenize(claim.text), claim.first_debunked, window_days, k);
}

} // namespace factgpt
