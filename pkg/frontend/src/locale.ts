// UI strings, Traditional-Chinese-first. Swap the exported `locale`
// object to localize without touching component code.

import type { Route } from "./types.js";

export interface Locale {
  appTitle: string;
  newChat: string;
  resumePlaceholder: string;
  resumeButton: string;
  unknownSession: string;
  inputPlaceholder: string;
  send: string;
  pending: string;
  retry: string;
  networkError: string;
  degradedTitle: string;
  citationsLabel: string;
  latency: (ms: number) => string;
  routeBadge: Record<Route, string>;
  previewLabel: string;
  previewSimilarity: (value: number) => string;
  previewConfidence: (value: number) => string;
  emptyTranscript: string;
}

export const zhTW: Locale = {
  appTitle: "客家文化問答",
  newChat: "新對話",
  resumePlaceholder: "輸入對話編號以繼續",
  resumeButton: "繼續對話",
  unknownSession: "找不到這個對話，請開始新對話。",
  inputPlaceholder: "請輸入問題，例如：擂茶是什麼？",
  send: "送出",
  pending: "思考中…",
  retry: "重試",
  networkError: "連線失敗，訊息尚未送出。",
  degradedTitle: "部分服務暫時無法使用",
  citationsLabel: "資料來源",
  latency: (ms) => `${ms} 毫秒`,
  routeBadge: {
    translation: "翻譯",
    cultural_kb: "文化知識",
    web_search: "網路搜尋",
  },
  previewLabel: "路由預覽",
  previewSimilarity: (value) => `相似度 ${value.toFixed(3)}`,
  previewConfidence: (value) => `信心 ${value.toFixed(2)}`,
  emptyTranscript: "開始對話吧！輸入問題、翻譯請求，或任何想了解的客家文化主題。",
};

export const locale: Locale = zhTW;
