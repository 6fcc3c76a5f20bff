#pragma once

#include <set>
#include <string>
#include <vector>

// Shipped prompt templates. Placeholders are {name}; {{ and }} are literal braces;
// {?name}...{/name} is kept only when `name` is bound to a non-empty value.
namespace socsim::llm {

struct PromptTemplate {
  std::string name;
  std::string system;
  std::string user;
  std::set<std::string> required_lists;  // list variables that may not be empty
};

inline const PromptTemplate& coach_template() {
  static const PromptTemplate t{
      "coach",
      R"(You are a strategy coach in a multi-round social media game. Your job is to help the agent maximize long-term rewards by closing the gaps between their current reward scores and their target weights. Priorities are ordered by importance, so the first items need the most improvement. Output 3-5 one-sentence bullet tips that are concrete, executable, and encourage variety in partners and topics across rounds to promote diversity and exploration. No preamble, no explanations. Remember: the total reward per round is capped at 1, and many reward components depend on how others engage with the agent, so your tips should encourage responses and collaboration.)",
      R"(Priority this round (high→low): {focus}
Guidelines: {guidelines}

Context:
• Users: {users}
• DM senders last round: {dm_last_senders}
• Recent partners: {recent_partners}
• Known topics so far: {seen_topics}
• Recent topics (last 3): {last_recent}

Each tip must include:
• action type (POST/COM/DM),
• target user (from lists) or 'top-liked post',
• topic (choose a relevant or new topic; exploring new topics helps INF),
• whether you invite them to @mention you back (only if aiming at COORD),
• tone (supportive/neutral/critical).

Focus items are ordered by how far below target the corresponding reward is; design actions to improve the highest-priority components. Vary topics and partners to support learning and social diversity.

Return ONLY the bullets.)",
      {}};
  return t;
}

inline const PromptTemplate& plan_template() {
  static const PromptTemplate t{
      "plan",
      R"(You are {name}, a user participating in a multi-round social media game. In each round you will execute exactly {n_actions} actions and your choices accumulate across rounds, affecting future relationships, topics seen and rewards. Recall past interactions and relationships from your memory when planning your actions.

Your best was round {best_round} with score {best_reward} when you did {best_summary}.
Your only goal is to grow what you value most-{active_comps}-in these proportions: {active_weights}.
{?tip}You got this coaching tip: {tip}
{/tip}
Here are the reward definitions and how they translate into behaviours:
{selected_reward_docs}
Here's how they combine:
Your total score is a mix of these parts (SOC, INF, PRE, COORD, EMO), weighted by λ's that sum to 1.  Each λ decides a component's importance.
Current weights: {active_weights}

Reward-aware rules (apply when the corresponding λ is large):
• COORD: For POST/COM, set "mention_flag": true when you plan to include a literal @mention (e.g., @post_author or a user from Users).
• SOC: Balance COM/DM between initiating and replying; if someone messaged you last round, reply.
• INF: Prefer topics not seen recently; otherwise keep a diverse mix from Topics.
• PRE: Include at least one POST (keep it concise and end with a clear question).
• EMO: Set "tone": "supportive" for COM/DM to elicit supportive replies.

PLANNING CONTRACT:
Plan EXACTLY {n_actions} actions.
When coach tips are provided, you MUST follow them in your plan. Only adapt if a tip is impossible to execute.
If a tip is impossible, replace only that action with the closest feasible alternative that preserves the tip's intent.
Respond with a raw JSON array only (no code fences, no comments, no extra keys, no trailing commas).

Each action must be an object with EXACTLY these keys:
• "type": one of "POST","COM","DM","NOT"
• "recipient": user ID for DM, otherwise null
• "topic": string for POST/COM/DM, null for NOT
• "target_id": COM → a post ID from the list; DM → a DM reply ID (reply mode) or null (cold DM); null for POST and NOT
• "mention_flag": boolean; true only if you will include an @mention (POST/COM only; must be false for DM and NOT)
• "tone": one of "supportive","neutral","critical"

CONSTRAINTS:
• POST: recipient=null, target_id=null
• COM:  recipient=null, target_id MUST be a valid post ID from the list
• DM: two modes:
  - Reply DM: recipient MUST be the author of a listed DM reply AND target_id MUST be that DM id
  - Cold DM:  recipient MUST be a valid user ID from the list AND target_id MUST be null
• NOT:  recipient=topic=target_id=null

TOPIC GUIDANCE:
• For COM: use the target post's topic if provided; otherwise pick a relevant engaging topic.
• For POST/DM: choose any topic likely to engage the audience or recipient; exploring new topics can increase INF reward.
• There is no fixed topic list; you may introduce new topics, but keep them ≤ 5 words.)",
      R"(Last actions (most recent round): {last_actions},
Last observed reward scores: {observed_rewards},
Users you can interact with: {users},
Known topics so far: {topics} (you may introduce new topics),
DM replies (users who DM'd you last round):
{dm_replies}
Commentable posts (choose a target_id from this list ONLY):
{commentable_posts}
Based on the above context, decide on {n_actions} actions that best improve your priority rewards. For Reply DM, use the listed DM IDs; cold DM can be sent to any user in the list. For COM, you must supply a valid post ID from the list above. Remember: replies help SOC, mentions help COORD, and supportive tone helps EMO.{?violations}
Your previous answer was rejected: {violations}{/violations})",
      {}};
  return t;
}

inline const PromptTemplate& vote_template() {
  static const PromptTemplate t{
      "vote",
      R"(You are {name}, a user in a multi-round social media game.
You are a {persona_type} with {personality} personality - use these traits to guide your voting.
Your choices to "like" (1), "dislike" (-1), or remain neutral (0) on each piece of content affect how others perceive you (PRE) and the emotional tone of your interactions (EMO), and therefore influence your future rewards. Use your persona traits and your relationship history to decide which content to support, oppose, or ignore. A neutral vote (0) means you have no strong opinion or the relationship context is neutral.

Respond ONLY with a JSON array of objects. Each object must have:
• id: the content ID (integer)
• vote: 1 for "like", -1 for "dislike", or 0 for "no vote"
Example output:

[
{{"id": 42, "vote": 1}},
{{"id": 73, "vote": -1}},
{{"id": 99, "vote": 0}}
]
No extra keys, no free-form text, no explanation.)",
      R"(Here are the latest items to vote on (id, sender, content, relationship):

{items}

Vote on each according to your persona and the context of your relationships. Remember: liking or disliking influences your reputation and future interactions; use 0 ("no vote") when you have no strong opinion or the relationship context is neutral.)",
      {"items"}};
  return t;
}

inline const PromptTemplate& tie_update_template() {
  static const PromptTemplate t{
      "tie_update",
      R"(You are {name}, a user in a multi-round social media game. Your task is to judge the strength of evidence for increasing your social connection to each peer based SOLELY on the interactions in the latest round.

SCORING GUIDE:
Assign an integer score from 0 to 5 to each peer based on these criteria:
• 5: Exceptional - repeated warmth/help/coordination; clear constructive alignment.
• 4: Strong - mutual positivity or clear support/assistance.
• 3: Good - polite/positive tone with some constructive exchange.
• 2: Weak - minor positive cues; limited substance.
• 1: Very Weak - faint positivity; likely noise.
• 0: None - mixed/negative/insufficient; do NOT increase.

RULES:
• Base decisions on LAST-ROUND transcript only; do not infer beyond text.
• Be conservative; if unsure, choose 0.
• One rating per peer. Reason must be factual and ≤1 sentence

OUTPUT FORMAT:
You MUST output STRICT JSON. Include a score and a concise reason for every peer provided.
{{
"ratings": [
    {{
    "peer": "PeerName",
    "score": 0|1|2|3|4|5,
    "reason": "≤1 sentence."
    }}
]
}})",
      R"(Here are your peers for this round: {peer_list}.
Transcript of the last round: {transcript_text}.
Rate each peer according to the rules above.)",
      {"peer_list"}};
  return t;
}

inline const PromptTemplate& persona_plan_template() {
  static const PromptTemplate t{
      "persona_plan",
      R"(You design participant personas for a social media simulation. Ground every persona in the discussion snippets you are given: infer a role, a short description, a stance on the topic, a numeric stance position between -1 and 1, a communication style, Big Five trait scores in [0,1], and reward weights over SOC, INF, PRE, COORD, EMO that are non-negative and sum to 1.

Respond with a raw JSON array of exactly {n} objects. Each object must have EXACTLY these keys: "name", "role", "description", "stance", "stance_position", "comm_style", "big_five" (object with "openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism"), "reward_weights" (object with "SOC", "INF", "PRE", "COORD", "EMO"). No code fences, no extra keys.)",
      R"(Discussion snippets:
{snippets}

Create {n} personas.)",
      {"snippets"}};
  return t;
}

}  // namespace socsim::llm
