#pragma once

#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/backend.hpp"
#include "cosim/parallel.hpp"
#include "cosim/persona.hpp"

namespace cosim {

// ---------------------------------------------------------------------------
// Questionnaire
// ---------------------------------------------------------------------------

inline DiagnosticItem diagnostic_item_from_json(const nlohmann::ordered_json& j) {
    DiagnosticItem item;
    item.scenario_text = j.at("scenario").get<std::string>();
    item.question_text = j.at("question").get<std::string>();
    const std::string trait = j.at("target_trait").get<std::string>();
    if (trait == "AOT") item.target_trait = TraitKind::AOT;
    else if (trait == "PI") item.target_trait = TraitKind::PI;
    else throw ConfigError("questionnaire: unknown target trait " + trait);
    const auto& opts = j.at("options");
    if (!opts.is_object() || opts.size() != 5)
        throw ConfigError("questionnaire: each item needs exactly five options A..E");
    for (int k = 0; k < 5; ++k) {
        const std::string letter(1, static_cast<char>('A' + k));
        item.options[static_cast<size_t>(k)] = opts.at(letter).get<std::string>();
    }
    return item;
}

/// Load the diagnostic questionnaire (an array of scenario/question/options
/// records) from a structured-text asset file.
inline std::vector<DiagnosticItem> load_questionnaire(const std::filesystem::path& path) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(read_text_file(path));
    if (!doc.is_array() || doc.empty()) throw ConfigError("questionnaire: non-empty array expected");
    std::vector<DiagnosticItem> items;
    for (const auto& j : doc) items.push_back(diagnostic_item_from_json(j));
    return items;
}

// ---------------------------------------------------------------------------
// Administration and scoring
// ---------------------------------------------------------------------------

/// Ask the backend every item as the given persona. Returns one letter per
/// item; a failed item aborts with the item index in the error.
inline std::vector<char> administer(const std::vector<DiagnosticItem>& items,
                                    const PersonaSpec& persona, AgentBackend& backend) {
    if (items.empty()) throw ConfigError("administer: empty questionnaire");
    std::vector<char> responses(items.size(), '?');
    for (size_t i = 0; i < items.size(); ++i) {
        char letter;
        try {
            letter = backend.answer_diagnostic(persona, items[i], i);
        } catch (const BackendError& e) {
            throw BackendError("diagnostic item " + std::to_string(i) + ": " + e.what());
        }
        if (letter < 'A' || letter > 'E')
            throw BackendError("diagnostic item " + std::to_string(i) +
                               ": backend returned non-option letter");
        responses[i] = letter;
    }
    return responses;
}

struct TraitTargets {
    double aot = 0.5;
    double pi = 0.5;
};

/// Option value mapping: A..E to the five band midpoints 0.1..0.9.
inline double option_value(char letter) {
    if (letter < 'A' || letter > 'E') throw ConfigError("option letter outside A..E");
    return 0.1 + 0.2 * static_cast<double>(letter - 'A');
}

/// Realized trait estimates: per-trait mean of the mapped option values.
inline TraitTargets score_responses(const std::vector<char>& responses,
                                    const std::vector<DiagnosticItem>& items) {
    if (responses.size() != items.size())
        throw ConfigError("score_responses: response/item count mismatch");
    double sums[2] = {0.0, 0.0};
    size_t counts[2] = {0, 0};
    for (size_t i = 0; i < items.size(); ++i) {
        const size_t k = items[i].target_trait == TraitKind::AOT ? 0 : 1;
        sums[k] += option_value(responses[i]);
        counts[k] += 1;
    }
    if (counts[0] == 0 || counts[1] == 0)
        throw ConfigError("score_responses: questionnaire covers only one trait");
    return TraitTargets{sums[0] / static_cast<double>(counts[0]),
                        sums[1] / static_cast<double>(counts[1])};
}

/// Mean absolute trait deviation: (1/N) * sum(|a - a_hat| + |p - p_hat|).
inline double diagnostic_loss(const std::vector<TraitTargets>& targets,
                              const std::vector<TraitTargets>& realized) {
    if (targets.size() != realized.size() || targets.empty())
        throw ConfigError("diagnostic_loss: target/realized length mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < targets.size(); ++i)
        sum += std::abs(targets[i].aot - realized[i].aot) + std::abs(targets[i].pi - realized[i].pi);
    return sum / static_cast<double>(targets.size());
}

// ---------------------------------------------------------------------------
// Calibration loop
// ---------------------------------------------------------------------------

struct CalibrationResult {
    PersonaTemplate selected_template;
    int selected_iteration = 0;  // 1-based
    std::vector<double> per_iteration_loss;
    std::vector<TraitTargets> realized;  // realized traits under the selected template
};

/// Iterate administer -> score -> loss for R rounds, asking the backend for
/// a template revision between rounds, and select the argmin-loss template.
/// A revision missing the required placeholders is rejected and the previous
/// template is measured again in the next iteration.
inline CalibrationResult calibrate(const PersonaTemplate& initial,
                                   const std::vector<TraitTargets>& cohort,
                                   const std::vector<DiagnosticItem>& items, AgentBackend& backend,
                                   int iterations = 10,
                                   const std::vector<BackgroundAttrs>& backgrounds =
                                       default_background_pool(),
                                   size_t in_flight = 1) {
    if (iterations < 1) throw ConfigError("calibrate: need at least one iteration");
    if (cohort.empty()) throw ConfigError("calibrate: empty cohort");

    CalibrationResult result;
    PersonaTemplate current = initial;
    double best_loss = std::numeric_limits<double>::infinity();

    for (int s = 1; s <= iterations; ++s) {
        current.version = s;
        std::vector<TraitTargets> realized(cohort.size());
        std::mutex error_mutex;
        std::optional<std::string> first_error;
        detail::for_each_agent(cohort.size(), in_flight, [&](size_t i) {
            try {
                const PersonaSpec persona = instantiate_persona(
                    cohort[i].aot, cohort[i].pi, backgrounds[i % backgrounds.size()], current);
                realized[i] = score_responses(administer(items, persona, backend), items);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = e.what();
            }
        });
        if (first_error) throw BackendError("calibration iteration " + std::to_string(s) + ": " +
                                            *first_error);

        const double loss = diagnostic_loss(cohort, realized);
        result.per_iteration_loss.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            result.selected_template = current;
            result.selected_iteration = s;
            result.realized = realized;
        }

        if (s == iterations) break;
        TemplateRevisionContext ctx;
        double target_aot = 0.0, target_pi = 0.0, observed_aot = 0.0, observed_pi = 0.0;
        for (size_t i = 0; i < cohort.size(); ++i) {
            target_aot += cohort[i].aot;
            target_pi += cohort[i].pi;
            observed_aot += realized[i].aot;
            observed_pi += realized[i].pi;
        }
        const double inv = 1.0 / static_cast<double>(cohort.size());
        ctx.target_aot = target_aot * inv;
        ctx.target_pi = target_pi * inv;
        ctx.observed_aot = observed_aot * inv;
        ctx.observed_pi = observed_pi * inv;
        ctx.current_template = current.body;
        PersonaTemplate revised;
        revised.body = backend.revise_template(ctx);
        revised.version = s + 1;
        if (revised.has_required_placeholders()) current = revised;
        // else: rejected, keep measuring the previous template
    }
    return result;
}

// ---------------------------------------------------------------------------
// Alignment metrics
// ---------------------------------------------------------------------------

struct AlignmentMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

struct AlignmentReport {
    AlignmentMetrics aot;
    AlignmentMetrics pi;
};

namespace detail {

inline AlignmentMetrics align_one_trait(const std::vector<double>& target,
                                        const std::vector<double>& realized) {
    const size_t n = target.size();
    AlignmentMetrics m;
    double se = 0.0, ae = 0.0;
    size_t correct = 0;
    size_t tp[kTraitBands] = {};
    size_t true_count[kTraitBands] = {};
    size_t pred_count[kTraitBands] = {};
    for (size_t i = 0; i < n; ++i) {
        const double d = target[i] - realized[i];
        se += d * d;
        ae += std::abs(d);
        const int tb = trait_band_index(target[i]);
        const int pb = trait_band_index(realized[i]);
        true_count[tb] += 1;
        pred_count[pb] += 1;
        if (tb == pb) {
            correct += 1;
            tp[tb] += 1;
        }
    }
    m.rmse = std::sqrt(se / static_cast<double>(n));
    m.mae = ae / static_cast<double>(n);
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    // macro-F1 over classes with at least one true or predicted member
    double f1_sum = 0.0;
    size_t classes = 0;
    for (int c = 0; c < kTraitBands; ++c) {
        if (true_count[c] == 0 && pred_count[c] == 0) continue;
        const double fp = static_cast<double>(pred_count[c] - tp[c]);
        const double fn = static_cast<double>(true_count[c] - tp[c]);
        const double denom = 2.0 * static_cast<double>(tp[c]) + fp + fn;
        f1_sum += denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
        classes += 1;
    }
    m.macro_f1 = classes > 0 ? f1_sum / static_cast<double>(classes) : 0.0;
    return m;
}

}  // namespace detail

/// Numerical (RMSE/MAE) and categorical (accuracy/macro-F1 over the five
/// trait bands) agreement between target and realized traits, per trait.
inline AlignmentReport alignment_metrics(const std::vector<TraitTargets>& targets,
                                         const std::vector<TraitTargets>& realized) {
    if (targets.size() != realized.size() || targets.empty())
        throw ConfigError("alignment_metrics: target/realized length mismatch");
    std::vector<double> ta, tp, ra, rp;
    for (size_t i = 0; i < targets.size(); ++i) {
        ta.push_back(targets[i].aot);
        tp.push_back(targets[i].pi);
        ra.push_back(realized[i].aot);
        rp.push_back(realized[i].pi);
    }
    AlignmentReport rep;
    rep.aot = detail::align_one_trait(ta, ra);
    rep.pi = detail::align_one_trait(tp, rp);
    return rep;
}

/// Targets for the 5x5 calibration grid: every AOT band midpoint crossed
/// with every PI band midpoint, `agents_per_cell` agents per cell.
inline std::vector<TraitTargets> grid_targets(size_t agents_per_cell) {
    std::vector<TraitTargets> cohort;
    for (int a = 0; a < kTraitBands; ++a)
        for (int p = 0; p < kTraitBands; ++p)
            for (size_t k = 0; k < agents_per_cell; ++k)
                cohort.push_back(TraitTargets{0.1 + 0.2 * a, 0.1 + 0.2 * p});
    return cohort;
}

}  // namespace cosim
