#include "prospect/prompt.hpp"

#include "prospect/error.hpp"
#include "prospect/hashing.hpp"

namespace prospect {

std::string_view to_string(DemoOrder order) {
    return order == DemoOrder::demonstration_first ? "demonstration_first" : "task_first";
}

DemoOrder parse_demo_order(std::string_view text) {
    if (text == "demonstration_first" || text == "demo_first") return DemoOrder::demonstration_first;
    if (text == "task_first") return DemoOrder::task_first;
    throw ConfigError("unknown demonstration order '" + std::string(text) +
                      "' (expected demonstration_first|task_first)");
}

namespace {

struct PlaceholderUse {
    bool instruction = false;
    bool input = false;
    bool output = false;
};

/// Walks the template once; calls `emit` for literal text and substituted values.
template <typename Emit>
PlaceholderUse scan(std::string_view tmpl, Emit&& emit, std::string_view instruction, std::string_view input,
                    const std::string* output) {
    PlaceholderUse use;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const char c = tmpl[i];
        if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            emit(std::string_view{"{"});
            i += 2;
        } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
            emit(std::string_view{"}"});
            i += 2;
        } else if (c == '{') {
            const auto close = tmpl.find('}', i);
            if (close == std::string_view::npos)
                throw TemplateError("unterminated placeholder at offset " + std::to_string(i));
            const auto name = tmpl.substr(i + 1, close - i - 1);
            if (name == "instruction") {
                use.instruction = true;
                emit(instruction);
            } else if (name == "input") {
                use.input = true;
                emit(input);
            } else if (name == "output") {
                use.output = true;
                if (output == nullptr) throw TemplateError("placeholder {output} is not resolvable here");
                emit(std::string_view{*output});
            } else {
                throw TemplateError("unknown placeholder {" + std::string(name) + "}");
            }
            i = close + 1;
        } else if (c == '}') {
            throw TemplateError("unbalanced '}' at offset " + std::to_string(i));
        } else {
            const auto next = tmpl.find_first_of("{}", i);
            const auto end = next == std::string_view::npos ? tmpl.size() : next;
            emit(tmpl.substr(i, end - i));
            i = end;
        }
    }
    return use;
}

std::string input_block(const std::optional<std::string>& input) {
    return (input && !input->empty()) ? "\n" + *input : std::string{};
}

}  // namespace

std::string render_template(std::string_view tmpl, std::string_view instruction, std::string_view input,
                            const std::string* output) {
    std::string out;
    scan(tmpl, [&](std::string_view piece) { out.append(piece); }, instruction, input, output);
    return out;
}

void PromptTemplate::validate() const {
    const std::string dummy;
    const auto noop = [](std::string_view) {};
    const auto q = scan(query, noop, {}, {}, &dummy);
    if (!q.instruction) throw TemplateError("query template must contain {instruction}");
    if (q.output) throw TemplateError("query template must not contain {output}: the answer is the scored continuation");
    const auto d = scan(demonstration, noop, {}, {}, &dummy);
    if (!d.instruction) throw TemplateError("demonstration template must contain {instruction}");
    if (!d.output) throw TemplateError("demonstration template must contain {output}");
}

std::string PromptTemplate::fingerprint() const {
    Fingerprinter fp;
    fp.add(std::string_view{"template-v1"}).add(query).add(demonstration).add(to_string(order));
    return fp.finish();
}

std::string PromptTemplate::render_query(const InstructionExample& example) const {
    return render_template(query, example.instruction, input_block(example.input), nullptr);
}

std::string PromptTemplate::render_demonstration(const InstructionExample& example) const {
    return render_template(demonstration, example.instruction, input_block(example.input), &example.output);
}

std::string PromptTemplate::zero_shot_context(const PredefinedTask& task) const {
    return render_template(query, task.task_text, {}, nullptr);
}

std::string PromptTemplate::one_shot_context(const InstructionExample& demo, const PredefinedTask& task) const {
    const auto q = zero_shot_context(task);
    const auto d = render_demonstration(demo);
    return order == DemoOrder::demonstration_first ? d + q : q + d;
}

}  // namespace prospect
