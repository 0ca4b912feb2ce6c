/** Wire types for the recommender service JSON API. */

export interface RecommendationItem {
  title: string;
  course_id?: number;
  url?: string;
  rating?: number;
  reason?: string;
}

export interface ChatResponse {
  session_id: string;
  reply: string;
  recommendations: RecommendationItem[];
  source: "rag" | "defaults";
  latency_ms: number;
}

export interface DefaultsResponse {
  recommendations: RecommendationItem[];
  source: "defaults";
}

export type Role = "user" | "assistant" | "system";

export interface Message {
  role: Role;
  text: string;
  recommendations?: RecommendationItem[];
}
