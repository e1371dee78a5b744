#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vikey/core/error.hpp"
#include "vikey/core/text.hpp"

namespace vikey::harness {

struct QuestionRecord {
    std::string id;
    std::string video_id;
    std::string question;
    std::vector<std::string> options;  // may be empty for open-ended items
    std::string answer;                // option letter, free text, or empty when ungraded
    std::string category;
    std::string task_type;
};

inline QuestionRecord question_from_json(const nlohmann::json& j, std::size_t line) {
    const auto where = "questions line " + std::to_string(line);
    if (!j.is_object()) throw FormatError(where + ": expected an object");
    auto str = [&](const char* key, bool required) -> std::string {
        const auto it = j.find(key);
        if (it == j.end() || it->is_null()) {
            if (required) throw FormatError(where + ": missing \"" + key + "\"");
            return {};
        }
        if (!it->is_string()) throw FormatError(where + ": \"" + key + "\" must be a string");
        return it->get<std::string>();
    };
    QuestionRecord q;
    q.id = str("id", true);
    q.video_id = str("video_id", true);
    q.question = str("question", true);
    q.answer = str("answer", false);
    q.category = str("category", false);
    q.task_type = str("task_type", false);
    if (q.category.empty()) q.category = "all";
    if (const auto it = j.find("options"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw FormatError(where + ": \"options\" must be a list of strings");
        for (const auto& o : *it) {
            if (!o.is_string()) throw FormatError(where + ": \"options\" must be a list of strings");
            q.options.push_back(o.get<std::string>());
        }
    }
    if (q.options.size() > 26) throw FormatError(where + ": more than 26 options");
    if (!q.options.empty() && !q.answer.empty()) {
        const bool ok = q.answer.size() == 1 && q.answer[0] >= 'A' &&
                        q.answer[0] < static_cast<char>('A' + q.options.size());
        if (!ok) throw FormatError(where + ": answer '" + q.answer + "' is not one of the option letters");
    }
    return q;
}

inline nlohmann::json question_to_json(const QuestionRecord& q) {
    return {{"id", q.id},           {"video_id", q.video_id}, {"question", q.question}, {"options", q.options},
            {"answer", q.answer},   {"category", q.category}, {"task_type", q.task_type}};
}

// One JSON object per line; blank lines are skipped. Ids must be unique.
inline std::vector<QuestionRecord> parse_questions(std::istream& in) {
    std::vector<QuestionRecord> out;
    std::set<std::string> ids;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError("questions line " + std::to_string(n) + ": " + e.what());
        }
        auto q = question_from_json(j, n);
        if (!ids.insert(q.id).second)
            throw FormatError("questions line " + std::to_string(n) + ": duplicate id '" + q.id + "'");
        out.push_back(std::move(q));
    }
    return out;
}

inline std::vector<QuestionRecord> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open questions file " + path.string());
    return parse_questions(in);
}

}  // namespace vikey::harness
