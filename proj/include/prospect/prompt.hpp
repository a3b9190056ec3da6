#pragma once

#include <string>
#include <string_view>

#include "prospect/datamodel.hpp"

namespace prospect {

/// Where the one-shot demonstration goes relative to the task query.
enum class DemoOrder {
    demonstration_first,  // [demo(IQ, IA), query(T)] -> answer
    task_first,           // [query(T), demo(IQ, IA)] -> answer
};

std::string_view to_string(DemoOrder order);
DemoOrder parse_demo_order(std::string_view text);

/// Prompt strings used to build scoring contexts.
///
/// Placeholders:
///   {instruction}  the instruction text (for a task: the task text T)
///   {input}        "\n" + input when the record has a non-empty input, else ""
///   {output}       the answer; allowed only in `demonstration`
///   {{ and }}      literal braces
///
/// `query` renders a question whose answer is the scored continuation, so
/// it must contain {instruction} and must not contain {output}.
/// `demonstration` renders a solved example and must contain both.
struct PromptTemplate {
    std::string query = "### Instruction:\n{instruction}{input}\n\n### Response:\n";
    std::string demonstration = "### Instruction:\n{instruction}{input}\n\n### Response:\n{output}\n\n";
    DemoOrder order = DemoOrder::demonstration_first;

    /// Throws TemplateError on unknown/unbalanced placeholders or missing required ones.
    void validate() const;

    /// Stable hash of all three fields; part of every cache key.
    std::string fingerprint() const;

    /// Context used for zero-shot scoring of a task.
    std::string zero_shot_context(const PredefinedTask& task) const;

    /// Context used for one-shot scoring of a task with `demo` as the demonstration.
    std::string one_shot_context(const InstructionExample& demo, const PredefinedTask& task) const;

    std::string render_query(const InstructionExample& example) const;
    std::string render_demonstration(const InstructionExample& example) const;
};

/// Low-level substitution. Unknown placeholders throw TemplateError;
/// {output} throws TemplateError when `output` is null.
std::string render_template(std::string_view tmpl, std::string_view instruction, std::string_view input,
                            const std::string* output);

}  // namespace prospect
