#pragma once

#include <string>

#include "cosim/util.hpp"

namespace cosim::prompts {

// Message templates used by the remote chat backend. Placeholders use the
// {slot_name} convention; literal JSON braces in output-format examples are
// left untouched by fill().

/// System message that assigns a persona to the remote model.
inline constexpr const char* kPersonaInstantiation =
    "You are now assigned the following persona:\n"
    "\n"
    "{persona_description}\n"
    "\n"
    "You are participating in an online social media environment where users discuss "
    "public events and controversial information.\n"
    "\n"
    "You should:\n"
    "- respond consistently with your persona\n"
    "- maintain stable reasoning and value tendencies\n"
    "- interact naturally with other users\n"
    "- update opinions according to evidence exposure and social interaction\n";

/// Diagnostic questionnaire wrapper. One filled instance per item.
inline constexpr const char* kQuestionnaireWrapper =
    "You are participating in a psychological assessment for LLM agent calibration.\n"
    "\n"
    "Scenario:\n"
    "{Scenario_Text}\n"
    "\n"
    "Question:\n"
    "{Question_Text}\n"
    "\n"
    "Target trait:\n"
    "{Target_Trait}\n"
    "\n"
    "Instructions:\n"
    "- respond according to the assigned persona\n"
    "- maintain consistency with the target trait level\n"
    "- do not optimize for correctness or social desirability\n"
    "- when the target trait is AOT, keep Political Ideology neutral\n"
    "- when the target trait is Political Ideology, keep AOT neutral\n"
    "- output only the selected option\n"
    "\n"
    "Options:\n"
    "A = lowest target trait level\n"
    "B = low target trait level\n"
    "C = medium target trait level\n"
    "D = high target trait level\n"
    "E = highest target trait level\n"
    "\n"
    "{Options_Text}\n";

/// Template-revision request sent between calibration iterations.
inline constexpr const char* kTemplateRevision =
    "You are optimizing a persona generation template for social simulation.\n"
    "\n"
    "Target traits:\n"
    "- target AOT score: {target_aot}\n"
    "- target PI score: {target_pi}\n"
    "\n"
    "Observed traits:\n"
    "- realized AOT score: {observed_aot}\n"
    "- realized PI score: {observed_pi}\n"
    "\n"
    "Current template:\n"
    "{current_template}\n"
    "\n"
    "Your task:\n"
    "- analyze the discrepancy between target and realized traits\n"
    "- revise the prompt template to better align behavioral responses with the target scores\n"
    "- preserve realism and behavioral coherence\n"
    "- avoid directly exposing numerical trait values\n"
    "\n"
    "Return only the revised template.\n";

/// Credibility assessment of one candidate claim.
inline constexpr const char* kCredibilityAssessment =
    "On a social networking platform, you receive various pieces of information. Based on "
    "the information you have previously known, please evaluate the credibility of the "
    "following claim:\n"
    "\n"
    "{misinformation}\n"
    "\n"
    "Credibility scale from 0 to 10:\n"
    "\n"
    "0.0--1.9:\n"
    "strongly not credible; clearly contradicted by fact-checks or verified evidence.\n"
    "\n"
    "2.0--3.9:\n"
    "clearly not credible; weak evidence or multiple suspicious details.\n"
    "\n"
    "4.0--4.9:\n"
    "slightly not credible or uncertain; overall leaning toward disbelief, but still ambiguous.\n"
    "\n"
    "5.0--5.9:\n"
    "neutral or uncertain; insufficient evidence to judge.\n"
    "\n"
    "6.0--6.9:\n"
    "slightly credible; some supporting basis, but still requires caution.\n"
    "\n"
    "7.0--8.0:\n"
    "clearly credible; multiple consistent sources or relatively strong evidence.\n"
    "\n"
    "8.1--10.0:\n"
    "highly credible; authoritative sources, sufficient data, and consistent corroboration.\n"
    "\n"
    "Output requirements:\n"
    "1. Provide a credibility score from 0 to 10. Decimals are allowed, preferably with 1 "
    "or 2 decimal places.\n"
    "2. Provide a detailed and evidence-based explanation.\n"
    "3. Output only a JSON object in the following format:\n"
    "\n"
    "{\n"
    "  \"score\": 6.7,\n"
    "  \"reason\": \"The claim appears to have a reliable source, but some details lack "
    "explicit evidence, so it is slightly credible.\"\n"
    "}\n";

/// Rolling information-summary update.
inline constexpr const char* kSummaryUpdate =
    "You are a social media user.\n"
    "\n"
    "Your historical information summary is:\n"
    "{history_summary}\n"
    "\n"
    "The new messages you received in the previous round are listed below.\n"
    "Each line follows the format:\n"
    "source_id: content\n"
    "\n"
    "{new_messages}\n"
    "\n"
    "Please update your information summary based on both the historical summary and the "
    "newly received messages. The updated summary should be around 500 words.\n"
    "\n"
    "Only summarize information you have actually received. Organize and synthesize the "
    "main information points from these messages, and describe your current understanding "
    "of the ongoing events.\n"
    "\n"
    "If some claims appear weakly supported or mutually contradictory, you may indicate "
    "whether they seem credible, suspicious, or difficult to judge. However, remain "
    "faithful to the received content and do not perform external fact verification.\n"
    "\n"
    "If multiple events are discussed, summarize them separately without assuming priority "
    "among them.\n"
    "\n"
    "Output plain text only. Do not include additional explanations.\n";

/// Joint rolling-summary and round-summary generation.
inline constexpr const char* kDualSummary =
    "You are a social media user.\n"
    "\n"
    "[Current Historical Summary]\n"
    "{history_summary}\n"
    "\n"
    "[New Messages in This Round]\n"
    "Each line follows the format:\n"
    "source_id: content\n"
    "\n"
    "{new_messages}\n"
    "\n"
    "Please complete the following two tasks simultaneously.\n"
    "\n"
    "(1) updated_history:\n"
    "Combine the historical summary with the newly received messages into a new rolling "
    "summary of approximately 500 words. Only summarize information you actually received. "
    "Multiple events may coexist. If information appears contradictory or weakly "
    "supported, you may label it as seemingly credible, suspicious, or difficult to judge. "
    "Do not perform external fact verification.\n"
    "\n"
    "(2) round_only:\n"
    "Generate a concise summary of approximately 200 words using only the messages "
    "received in the current round. Ignore earlier history.\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"updated_history\": \"...\",\n"
    "  \"round_only\": \"...\"\n"
    "}\n"
    "\n"
    "Do not output any text outside the JSON object.\n";

/// Main cognitive prompt: trust judgment, emotion, opinion, decision, and
/// public post for one round.
inline constexpr const char* kCognitiveResponse =
    "You are a social media user with the following profile.\n"
    "\n"
    "Gender:\n"
    "{gender}\n"
    "\n"
    "Age group:\n"
    "{age}\n"
    "\n"
    "Occupation:\n"
    "{occupation}\n"
    "\n"
    "[Background Story]\n"
    "{background_story}\n"
    "\n"
    "Communication preference:\n"
    "{preference_appendix}\n"
    "\n"
    "Historical summary:\n"
    "{history_summary}\n"
    "\n"
    "New inputs in this round:\n"
    "Each line follows the format:\n"
    "source_id: content\n"
    "\n"
    "{new_messages}\n"
    "\n"
    "Round summary:\n"
    "{message_summary}\n"
    "\n"
    "Intervention history:\n"
    "{intervention_history}\n"
    "\n"
    "The current information environment contains a mixture of true and false claims. "
    "Please simultaneously generate a trust judgment, emotional response, opinion, "
    "behavioral decision, and public posting behavior.\n"
    "\n"
    "Your opinion and post should reflect your attitude toward the credibility or "
    "truthfulness of the information, including belief, skepticism, rejection, or "
    "uncertainty, while remaining consistent with your persona and communication "
    "preference.\n"
    "\n"
    "Behavior is restricted to only two labels:\n"
    "post_only or none.\n"
    "Private messaging is not allowed.\n"
    "\n"
    "If decision = post_only, generate post_text.\n"
    "If decision = none, post_text should be an empty string.\n"
    "\n"
    "Do not provide behavioral explanations.\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"trust\": 0.5,\n"
    "  \"emotion\": \"joy|anger|fear|sadness|disgust|surprise|none\",\n"
    "  \"emotion_reason\": \"1-2 short sentences\",\n"
    "  \"opinion\": \"one sentence opinion reflecting stance toward credibility or truthfulness\",\n"
    "  \"why_opinion\": \"1-2 short sentences describing reasoning or doubts\",\n"
    "  \"decision\": \"post_only|none\",\n"
    "  \"post_text\": \"generated public post; empty if decision is none\"\n"
    "}\n"
    "\n"
    "The value of trust must be a number between 0.0 and 1.0 expressing your current "
    "trust in the claim under discussion being true.\n"
    "Do not output any text outside the JSON object.\n";

/// Stance annotation of one public post.
inline constexpr const char* kStanceAnnotation =
    "You are annotating public social media posts written in response to a possibly false "
    "claim.\n"
    "\n"
    "[Claim]\n"
    "{claim}\n"
    "\n"
    "[Post]\n"
    "{message}\n"
    "\n"
    "Assign exactly one stance label describing the post's position toward the claim:\n"
    "- support: acceptance or amplification of the claim\n"
    "- deny: rejection or correction of the claim\n"
    "- query: uncertainty or a demand for verification\n"
    "- comment: peripheral or noncommittal discussion\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"stance\": \"support|deny|query|comment\"\n"
    "}\n"
    "\n"
    "Do not output any text outside the JSON object.\n";

/// Evidence-free persuasion message request.
inline constexpr const char* kPersuasionPlain =
    "[Misinformation]\n"
    "{misinformation_origin}\n"
    "\n"
    "Please generate a corrective and persuasive response to the misinformation above.\n"
    "\n"
    "The response should contain approximately 200--300 words.\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"reply\": \"a high-quality persuasive response\"\n"
    "}\n"
    "\n"
    "Do not output any text outside the JSON object.\n";

/// Evidence-grounded persuasion message request.
inline constexpr const char* kPersuasionEvidence =
    "Goal:\n"
    "Strongly correct the misinformation using authoritative verification evidence, and "
    "emphasize the harmful consequences of continued misinformation spreading, including "
    "health risks, public panic, legal responsibility, or severe reputational damage.\n"
    "\n"
    "Requirements:\n"
    "Use forceful, authoritative, and unambiguous language. Clearly state that the claim "
    "is false and harmful, and strongly urge immediate termination of further spreading. "
    "The response must accurately reflect the verification evidence and must not invent "
    "information beyond the provided evidence. Emphasize practical consequences and "
    "responsibility boundaries while avoiding uncontrolled insults.\n"
    "\n"
    "[Verification Evidence]\n"
    "{gold_evidence}\n"
    "\n"
    "[Misinformation]\n"
    "{misinformation_origin}\n"
    "\n"
    "Generate a corrective and persuasive response based on the evidence above.\n"
    "\n"
    "The response should contain approximately 200--300 words.\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"reply\": \"a high-quality evidence-grounded persuasive response\"\n"
    "}\n"
    "\n"
    "Do not output any text outside the JSON object.\n";

/// Fact-check request decision.
inline constexpr const char* kFactCheckDecision =
    "You are participating in a social media information environment simulation. The "
    "following information summarizes your current state for decision-making.\n"
    "\n"
    "[Misinformation Summary]\n"
    "{misinformation}\n"
    "\n"
    "[Your Information Summary]\n"
    "{history_summary}\n"
    "\n"
    "[Your Current Opinion]\n"
    "{opinion}\n"
    "\n"
    "[Your Current Emotion]\n"
    "{emotion}\n"
    "\n"
    "The platform provides an optional fact checking service. You may actively request a "
    "fact check regarding the misinformation above.\n"
    "\n"
    "If you choose to initiate fact checking, you will receive a summary of verification "
    "evidence derived from authoritative materials.\n"
    "\n"
    "Please decide whether you want to perform fact checking.\n"
    "\n"
    "Strictly output JSON only:\n"
    "\n"
    "{\n"
    "  \"want_fact_check\": true,\n"
    "  \"reason\": \"one sentence explanation\"\n"
    "}\n"
    "\n"
    "The value of want_fact_check must be either true or false. Do not output any text "
    "outside the JSON object.\n";

/// Fill one {slot} in a template. Output-format examples keep their literal
/// braces because only the exact {key} token is replaced.
inline std::string fill(std::string text, std::string_view key, std::string_view value) {
    return replace_all(std::move(text), std::string("{") + std::string(key) + "}", value);
}

}  // namespace cosim::prompts
