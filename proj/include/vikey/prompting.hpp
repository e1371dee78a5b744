#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vikey/core/error.hpp"
#include "vikey/core/text.hpp"
#include "vikey/visual_prompter.hpp"

namespace vikey::prompting {

enum class DatasetStyle { tempcompass, mvbench, videomme, longvideobench, generic };

inline DatasetStyle parse_dataset_style(std::string_view s) {
    const auto l = text::to_lower(s);
    if (l == "tempcompass") return DatasetStyle::tempcompass;
    if (l == "mvbench") return DatasetStyle::mvbench;
    if (l == "videomme") return DatasetStyle::videomme;
    if (l == "longvideobench") return DatasetStyle::longvideobench;
    if (l == "generic") return DatasetStyle::generic;
    throw ConfigError("unknown prompt profile '" + std::string(s) + "'");
}

inline std::string_view to_string(DatasetStyle s) {
    switch (s) {
        case DatasetStyle::tempcompass: return "tempcompass";
        case DatasetStyle::mvbench: return "mvbench";
        case DatasetStyle::videomme: return "videomme";
        case DatasetStyle::longvideobench: return "longvideobench";
        case DatasetStyle::generic: return "generic";
    }
    return "generic";
}

inline std::string_view position_word(vp::Corner c) {
    switch (c) {
        case vp::Corner::TL: return "top-left";
        case vp::Corner::TR: return "top-right";
        case vp::Corner::BL: return "bottom-left";
        case vp::Corner::BR: return "bottom-right";
    }
    return "bottom-left";
}

struct PromptProfile {
    DatasetStyle dataset_style = DatasetStyle::generic;
    vp::Corner position = vp::Corner::BL;
};

inline constexpr std::string_view kBaseSystem = "You are a helpful assistant.";

inline std::string system_prompt(const PromptProfile& p) {
    return std::string(kBaseSystem) +
           "\nFocus on the temporal relationships by referring to the number written in the " +
           std::string(position_word(p.position)) + " corner of each frame.";
}

// Closing line appended to every user prompt. TempCompass selects by task type;
// an empty task type means multi-choice, anything unlisted falls back to the
// generic closing.
inline std::string_view closing_line(DatasetStyle style, std::string_view task_type = {}) {
    constexpr std::string_view kGeneric = "Please answer the question.";
    switch (style) {
        case DatasetStyle::mvbench: return "Only give the best option.";
        case DatasetStyle::videomme: return "The best answer is:";
        case DatasetStyle::longvideobench: return "Answer with the option's letter from the given choices directly.";
        case DatasetStyle::tempcompass: {
            const auto t = text::to_lower(task_type);
            if (t.empty() || t == "multi-choice" || t == "multi_choice" || t == "caption_matching" ||
                t == "caption matching" || t == "captioning")
                return "Please directly give the best option.";
            if (t == "yes_no" || t == "yes/no" || t == "yes-no") return "Please answer yes or no.";
            return kGeneric;
        }
        case DatasetStyle::generic: return kGeneric;
    }
    return kGeneric;
}

inline char option_letter(std::size_t i) { return static_cast<char>('A' + i); }

// Option text without a leading "X. " that repeats its assigned letter.
inline std::string_view strip_option_letter(std::string_view opt, std::size_t i) {
    const char letter = option_letter(i);
    if (opt.size() >= 2 && opt[0] == letter && (opt[1] == '.' || opt[1] == ')'))
        return text::trim(opt.substr(2));
    return opt;
}

inline std::string lettered_option(std::string_view opt, std::size_t i) {
    return std::string(1, option_letter(i)) + ". " + std::string(strip_option_letter(opt, i));
}

inline std::string user_prompt(const PromptProfile& p, std::string_view question,
                               const std::vector<std::string>& options, std::string_view task_type = {}) {
    if (options.size() > 26) throw std::invalid_argument("user_prompt: more than 26 options");
    std::string out(question);
    for (std::size_t i = 0; i < options.size(); ++i) out += "\n" + lettered_option(options[i], i);
    out += "\n";
    out += closing_line(p.dataset_style, task_type);
    return out;
}

// ---------------------------------------------------------------------------
// Keyword extractor prompts.

inline constexpr std::string_view kExtractorSystem =
    "You are a helpful assistant that only extracts keywords and outputs them as a Python list.";

inline constexpr std::string_view kExtractorRules =
    "Follow these rules carefully:\n"
    "1. Identify Key Phrases: Your goal is to extract key phrases from the question that refer to specific "
    "scenes, events, actions, or distinct items.\n"
    "2. Exact Extraction: The extracted phrases must appear exactly as they do in the question. Do not modify "
    "or rephrase them.\n"
    "3. Empty List Condition: If no relevant key phrases (as defined in Rule 1) are found in the question, you "
    "must return an empty list [].";

struct FewShot {
    std::string_view question;
    std::string_view answer;
};

inline std::array<FewShot, 2> few_shot_examples(DatasetStyle style) {
    switch (style) {
        case DatasetStyle::tempcompass:
            return {{{"Which sentence better captures the essence of the video?", "[]"},
                     {"Which description is a more suitable match for the video?", "[]"}}};
        case DatasetStyle::videomme:
            return {{{"When is the zodiacal light visible from the video?", R"(["the zodiacal light"])"},
                     {"Which GPT is introduced after Convert Anything?", R"(["Convert Anything"])"}}};
        case DatasetStyle::longvideobench:
            return {{{"In front of a blue background, a gentleman wearing a shirt with pink floral patterns is "
                      "speaking. What did the gentleman do after becoming friends with the unicorn?",
                      R"(["gentleman wearing a shirt with pink floral patterns is speaking", "becoming friends with the unicorn"])"},
                     {"In the movie scene, there is a man in gray-black clothes standing between a red door and "
                      "wall on the left, and a silver-white window and yellow wall on the right. After this man "
                      "appears, which person or object appears first?",
                      R"(["man in gray-black clothes standing", "a red door and wall on the left, and a silver-white window and yellow wall on the right"])"}}};
        case DatasetStyle::mvbench:
        case DatasetStyle::generic:
            return {{{"What happened after the person took the food?", R"(["the person took the food"])"},
                     {"What happened after the person closed the door?", R"(["the person closed the door"])"}}};
    }
    return few_shot_examples(DatasetStyle::generic);
}

struct ChatPrompt {
    std::string system;
    std::string user;
};

inline ChatPrompt extractor_prompt(const PromptProfile& p, std::string_view question) {
    std::string user(kExtractorRules);
    const auto shots = few_shot_examples(p.dataset_style);
    for (std::size_t i = 0; i < shots.size(); ++i) {
        user += "\n\nExample " + std::to_string(i + 1) + ":\nQuestion: ";
        user += shots[i].question;
        user += "\nYour Answer: ";
        user += shots[i].answer;
    }
    user += "\n\nNow:\nQuestion: ";
    user += question;
    user += "\nYour Answer:";
    return {std::string(kExtractorSystem), std::move(user)};
}

}  // namespace vikey::prompting
