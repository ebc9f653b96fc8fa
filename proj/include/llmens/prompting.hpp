#pragma once

#include <string>
#include <utility>
#include <vector>

namespace llmens {

// Completion-style prompt template with three blocks. The rendered prompt is
//
//   <instruction>\n\n<example_header>\n<example block x k>\n\n<output block>
//
// where k-shot repeats the example block (blank line between pairs) under a
// single example header. The output block must end with the rating cue
// "Rating: " (trailing space, nothing after) so the single generated token
// is the rating digit itself.
struct PromptTemplate {
    std::string instruction;
    std::string example_header = "### Example";
    std::string example_block;  // uses {example_review} and {example_label}
    std::string output_block;   // uses {user_review}, ends with "Rating: "
};

// The built-in restaurant-review template.
PromptTemplate default_template();

// Parses a template file with [instruction] / [example_header] (optional) /
// [example] / [output] section markers, each on its own line.
PromptTemplate load_template(const std::string& path);

void validate(const PromptTemplate& tpl);

// Pure rendering; example labels must be in {1..5}, user_review non-empty.
std::string render_prompt(const PromptTemplate& tpl,
                          const std::vector<std::pair<std::string, int>>& examples,
                          const std::string& user_review);

}  // namespace llmens
