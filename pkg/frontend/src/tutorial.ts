/** First-upload tutorial overlay; dismissal persists in local storage. */

export const TUTORIAL_STORAGE_KEY = "reekit.tutorial.dismissed";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export const TUTORIAL_COPY = [
  "Each uploaded row is a rare earth element pattern: concentrations for La through Lu.",
  "Patterns are normalised to a reference standard and fitted with orthogonal polynomials.",
  "The fitted coefficients summarise each pattern as a point:",
  "λ0 measures overall REE abundance,",
  "λ1 the slope between light and heavy REEs,",
  "λ2 the curvature (middle REE enrichment),",
  "λ3 the sinusoidality at the pattern's ends.",
  "Use the visualisations to compare samples, then open any point in the sandbox to explore how pattern shape and coefficients map onto each other.",
];

export function shouldShowTutorial(store: KeyValueStore): boolean {
  return store.getItem(TUTORIAL_STORAGE_KEY) !== "1";
}

export function dismissTutorial(store: KeyValueStore): void {
  store.setItem(TUTORIAL_STORAGE_KEY, "1");
}
