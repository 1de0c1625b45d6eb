/** Wire types for the occusearch REST API (see docs/api.md in the repo root). */

export interface MatchCard {
  productId: string;
  name: string;
  category: string;
  score: number;
  categoryScore: number;
  imageUrl: string;
}

export interface SearchResponse {
  restoredImage: string; // base64 PNG
  preprocMode: string;
  category: string;
  matches: MatchCard[];
}

export interface RestoreResponse {
  preprocessed: string;
  restored: string;
  edges: string;
  preprocMode: string;
}

export interface ProductMetadata {
  colorHist: number[];
  edgeHist: number[];
  aspectRatio: number;
  width: number;
  height: number;
  category: string | null;
  createdAt: string;
}

export interface ProductRecord {
  id: string;
  name: string;
  category: string;
  metadata: ProductMetadata;
  imagePath: string;
  registeredAt: string;
}

export interface CategoryInfo {
  id: string;
  name: string;
  productCount: number;
}

export type Engine = "diffusion" | "pconv";

export const ENGINES: readonly Engine[] = ["diffusion", "pconv"];
