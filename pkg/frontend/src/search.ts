/** Case-insensitive substring filter over the symptom checklist.
 * An empty query lists the whole vocabulary, so every entry is reachable. */
export function filterSymptoms(vocabulary: string[], query: string): string[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return [...vocabulary];
  return vocabulary.filter((name) => name.toLowerCase().includes(needle));
}
