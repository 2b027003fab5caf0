/** Split a title into spans so extracted terms can be highlighted.
 *
 * Longest surfaces match first so "anti-microbial keyboard" wins over a
 * bare "keyboard"; matching is case-insensitive on whole words.
 */

export interface Span {
  text: string;
  kind: "plain" | "rt" | "kt";
}

function escapeRegExp(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

export function highlightTerms(
  title: string,
  requestTerms: string[],
  knownTerms: string[],
): Span[] {
  const targets: { surface: string; kind: "rt" | "kt" }[] = [
    ...requestTerms.map((surface) => ({ surface, kind: "rt" as const })),
    ...knownTerms.map((surface) => ({ surface, kind: "kt" as const })),
  ]
    .filter((t) => t.surface.trim().length > 0)
    .sort((a, b) => b.surface.length - a.surface.length);

  let spans: Span[] = [{ text: title, kind: "plain" }];
  for (const { surface, kind } of targets) {
    const pattern = new RegExp(
      `(?<![\\w-])${escapeRegExp(surface).replace(/ /g, "[\\s/]+")}(?![\\w-])`,
      "gi",
    );
    const next: Span[] = [];
    for (const span of spans) {
      if (span.kind !== "plain") {
        next.push(span);
        continue;
      }
      let last = 0;
      for (const match of span.text.matchAll(pattern)) {
        const at = match.index ?? 0;
        if (at > last) next.push({ text: span.text.slice(last, at), kind: "plain" });
        next.push({ text: match[0], kind });
        last = at + match[0].length;
      }
      if (last < span.text.length) {
        next.push({ text: span.text.slice(last), kind: "plain" });
      }
    }
    spans = next;
  }
  return spans.filter((s) => s.text.length > 0);
}
