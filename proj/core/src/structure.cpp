#include "dlcot/structure.hpp"

#include <algorithm>
#include <cctype>

#include "dlcot/errors.hpp"

namespace dlcot {

namespace {

std::string fold_name(std::string_view name) {
  std::string folded;
  folded.reserve(name.size());
  for (char c : name) {
    if (c == ' ' || c == '-') c = '_';
    folded += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return folded;
}

std::string slice_string(std::string_view original, const Span& span) {
  return std::string(span.slice(original));
}

}  // namespace

const char* macro_section_name(MacroSection section) {
  switch (section) {
    case MacroSection::question_repeat: return "Question_Repeat";
    case MacroSection::problem_understand: return "Problem_Understand";
    case MacroSection::approach_explore: return "Approach_Explore";
    case MacroSection::verify: return "Verify";
    case MacroSection::conclusion: return "Conclusion";
  }
  return "Unknown";
}

std::optional<MacroSection> macro_section_from_name(std::string_view name) {
  const std::string folded = fold_name(name);
  if (folded == "question_repeat") return MacroSection::question_repeat;
  if (folded == "problem_understand") return MacroSection::problem_understand;
  if (folded == "approach_explore" || folded == "solution_explore") {
    return MacroSection::approach_explore;
  }
  if (folded == "verify" || folded == "verification") return MacroSection::verify;
  if (folded == "conclusion") return MacroSection::conclusion;
  return std::nullopt;
}

bool MacroSegments::has(MacroSection section) const {
  return find(section).has_value();
}

std::optional<Span> MacroSegments::find(MacroSection section) const {
  for (const auto& entry : entries) {
    if (entry.section == section) return entry.span;
  }
  return std::nullopt;
}

std::vector<MacroSection> MacroSegments::order() const {
  std::vector<MacroSection> sections;
  sections.reserve(entries.size());
  for (const auto& entry : entries) sections.push_back(entry.section);
  return sections;
}

std::vector<Span> MacroSegments::spans() const {
  std::vector<Span> spans;
  spans.reserve(entries.size());
  for (const auto& entry : entries) spans.push_back(entry.span);
  return spans;
}

nlohmann::json MacroSegments::to_payload(std::string_view original) const {
  nlohmann::json sections = nlohmann::json::object();
  nlohmann::json offsets = nlohmann::json::array();
  nlohmann::json order_names = nlohmann::json::array();
  for (const auto& entry : entries) {
    const char* name = macro_section_name(entry.section);
    sections[name] = slice_string(original, entry.span);
    offsets.push_back({{"section", name},
                       {"begin", entry.span.begin},
                       {"end", entry.span.end}});
    order_names.push_back(name);
  }
  return nlohmann::json{
      {"sections", sections}, {"order", order_names}, {"offsets", offsets}};
}

MacroSegments MacroSegments::from_payload(const nlohmann::json& payload) {
  MacroSegments segments;
  for (const auto& item : payload.at("offsets")) {
    const auto section = macro_section_from_name(item.at("section").get<std::string>());
    if (!section) {
      throw RecordError("segmented payload names unknown section: " +
                        item.at("section").get<std::string>());
    }
    segments.entries.push_back(
        Entry{*section, Span{item.at("begin").get<std::size_t>(),
                             item.at("end").get<std::size_t>()}});
  }
  return segments;
}

Span Approach::full_span() const {
  if (stages.empty()) return {};
  return Span{stages.front().span.begin, stages.back().span.end};
}

nlohmann::json ApproachTree::to_payload(std::string_view original) const {
  nlohmann::json readable = nlohmann::json::object();
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& approach : approaches) {
    nlohmann::json stages_readable = nlohmann::json::object();
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& stage : approach.stages) {
      std::string key = stage.name;
      int suffix = 2;
      while (stages_readable.contains(key)) {
        key = stage.name + " (" + std::to_string(suffix++) + ")";
      }
      stages_readable[key] = slice_string(original, stage.span);
      stages.push_back({{"name", stage.name},
                        {"begin", stage.span.begin},
                        {"end", stage.span.end}});
    }
    readable["Approach" + std::to_string(approach.index)] = stages_readable;
    offsets.push_back({{"index", approach.index}, {"stages", stages}});
  }
  return nlohmann::json{{"Approach_Explore", readable}, {"offsets", offsets}};
}

ApproachTree ApproachTree::from_payload(const nlohmann::json& payload) {
  ApproachTree tree;
  for (const auto& item : payload.at("offsets")) {
    Approach approach;
    approach.index = item.at("index").get<int>();
    for (const auto& stage : item.at("stages")) {
      approach.stages.push_back(
          ApproachStage{stage.at("name").get<std::string>(),
                        Span{stage.at("begin").get<std::size_t>(),
                             stage.at("end").get<std::size_t>()}});
    }
    tree.approaches.push_back(std::move(approach));
  }
  return tree;
}

const char* verification_flag_name(VerificationFlag flag) {
  switch (flag) {
    case VerificationFlag::self_affirmation: return "self_affirmation";
    case VerificationFlag::self_negation: return "self_negation";
    case VerificationFlag::substantive: return "substantive";
  }
  return "unknown";
}

VerificationFlag verification_flag_from_category(std::string_view category) {
  const std::string folded = fold_name(category);
  if (folded.find("self_affirmation") != std::string::npos) {
    return VerificationFlag::self_affirmation;
  }
  if (folded.find("self_negation") != std::string::npos) {
    return VerificationFlag::self_negation;
  }
  return VerificationFlag::substantive;
}

nlohmann::json VerificationSet::to_payload(std::string_view original) const {
  nlohmann::json readable = nlohmann::json::object();
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& item : items) {
    std::string key = item.category;
    int suffix = 2;
    while (readable.contains(key)) {
      key = item.category + " (" + std::to_string(suffix++) + ")";
    }
    readable[key] = slice_string(original, item.span);
    offsets.push_back({{"category", item.category},
                       {"flag", verification_flag_name(item.flag)},
                       {"begin", item.span.begin},
                       {"end", item.span.end}});
  }
  return nlohmann::json{{"Verify", readable}, {"offsets", offsets}};
}

VerificationSet VerificationSet::from_payload(const nlohmann::json& payload) {
  VerificationSet set;
  for (const auto& item : payload.at("offsets")) {
    VerificationItem entry;
    entry.category = item.at("category").get<std::string>();
    entry.flag = verification_flag_from_category(entry.category);
    entry.span = Span{item.at("begin").get<std::size_t>(),
                      item.at("end").get<std::size_t>()};
    set.items.push_back(std::move(entry));
  }
  return set;
}

}  // namespace dlcot
