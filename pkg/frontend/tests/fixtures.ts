import type { AnswerEnvelope, SessionTranscript } from "../src/types.js";

export const culturalEnvelope: AnswerEnvelope = {
  answer: "擂茶是客家代表性的米食飲品嗎\nuses [1]\nuses [2]",
  route: "cultural_kb",
  citations: [
    {
      citation_id: "1",
      source_kind: "encyclopedia",
      ref: "encyclopedia:leicha",
      quote: "擂茶是客家代表性的米食飲品，將茶葉、花生、芝麻放入擂缽研磨成粉。",
    },
    {
      citation_id: "2",
      source_kind: "characteristic_words",
      ref: "characteristic_words:伯公",
      quote: "客家人對土地神的親切稱呼。",
    },
  ],
  latency_ms: 7,
  degraded: null,
};

export const translationEnvelope: AnswerEnvelope = {
  answer: "請翻譯成客語：謝謝\n譯文：請翻譯成客語：恁仔細",
  route: "translation",
  citations: [],
  latency_ms: 3,
  degraded: null,
};

export const degradedEnvelope: AnswerEnvelope = {
  answer: "抱歉，外部服務暫時無法使用，目前無法完整回答這個問題，請稍後再試。",
  route: "web_search",
  citations: [],
  latency_ms: 5,
  degraded: "web_search:unavailable",
};

export const fixtureSession: SessionTranscript = {
  session_id: "a".repeat(32),
  created_at_ms: 1700000000000,
  answer_in_hakka: false,
  messages: [
    { turn: 0, author: "user", text: "請翻譯成客語：謝謝", envelope: null },
    { turn: 1, author: "assistant", text: translationEnvelope.answer, envelope: translationEnvelope },
    { turn: 2, author: "user", text: "擂茶是客家代表性的米食飲品嗎", envelope: null },
    { turn: 3, author: "assistant", text: culturalEnvelope.answer, envelope: culturalEnvelope },
    { turn: 4, author: "user", text: "今天天氣如何", envelope: null },
    { turn: 5, author: "assistant", text: degradedEnvelope.answer, envelope: degradedEnvelope },
  ],
};
