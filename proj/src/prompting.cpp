#include "llmens/prompting.hpp"

#include <sstream>

#include "llmens/error.hpp"
#include "llmens/io.hpp"

namespace llmens {

namespace {

constexpr const char* kRatingCue = "Rating: ";

std::string replace_all(std::string s, const std::string& slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(slot, pos)) != std::string::npos) {
        s.replace(pos, slot.size(), value);
        pos += value.size();
    }
    return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

PromptTemplate default_template() {
    PromptTemplate tpl;
    tpl.instruction =
        "### Instruction\n"
        "You are a helpful assistant evaluating the review texts about the restaurant. "
        "Please evaluate the review text and assign an integer score ranging from 1 for the "
        "most negative comment to 5 for the most positive comment.";
    tpl.example_block =
        "User review: {example_review}\n"
        "Rating: {example_label}";
    tpl.output_block =
        "### Output\n"
        "User review: {user_review}\n"
        "Rating: ";
    return tpl;
}

void validate(const PromptTemplate& tpl) {
    if (tpl.instruction.empty()) throw validation_error("template: empty instruction block");
    if (tpl.example_block.find("{example_review}") == std::string::npos ||
        tpl.example_block.find("{example_label}") == std::string::npos) {
        throw validation_error("template: example block needs {example_review} and {example_label}");
    }
    if (tpl.output_block.find("{user_review}") == std::string::npos) {
        throw validation_error("template: output block needs {user_review}");
    }
    if (!ends_with(tpl.output_block, kRatingCue)) {
        throw validation_error(std::string("template: output block must end with '") + kRatingCue +
                               "'");
    }
}

PromptTemplate load_template(const std::string& path) {
    PromptTemplate tpl;
    tpl.instruction.clear();
    tpl.example_block.clear();
    tpl.output_block.clear();

    std::istringstream in(read_file(path));
    std::string line;
    std::string* current = nullptr;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "[instruction]") { current = &tpl.instruction; continue; }
        if (line == "[example_header]") { tpl.example_header.clear(); current = &tpl.example_header; continue; }
        if (line == "[example]") { current = &tpl.example_block; continue; }
        if (line == "[output]") { current = &tpl.output_block; continue; }
        if (!current) continue;
        if (!current->empty()) current->push_back('\n');
        current->append(line);
    }
    tpl.instruction = strip_trailing_newlines(tpl.instruction);
    tpl.example_header = strip_trailing_newlines(tpl.example_header);
    tpl.example_block = strip_trailing_newlines(tpl.example_block);
    // the output block keeps its exact tail: the rating cue's trailing
    // space is significant
    validate(tpl);
    return tpl;
}

std::string render_prompt(const PromptTemplate& tpl,
                          const std::vector<std::pair<std::string, int>>& examples,
                          const std::string& user_review) {
    validate(tpl);
    if (examples.empty()) throw validation_error("render_prompt: need at least one example");
    if (user_review.empty()) throw validation_error("render_prompt: empty user review");
    for (const auto& [text, label] : examples) {
        if (label < 1 || label > 5) {
            throw validation_error("render_prompt: example label out of range: " +
                                   std::to_string(label));
        }
    }

    std::string out = tpl.instruction;
    out += "\n\n";
    out += tpl.example_header;
    for (const auto& [text, label] : examples) {
        out += "\n";
        out += replace_all(replace_all(tpl.example_block, "{example_review}", text),
                           "{example_label}", std::to_string(label));
        out += "\n";
    }
    out += "\n";
    out += replace_all(tpl.output_block, "{user_review}", user_review);
    return out;
}

}  // namespace llmens
