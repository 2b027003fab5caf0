import { describe, expect, it } from "vitest";

import { highlightTerms } from "../src/highlight.js";

describe("highlightTerms", () => {
  it("marks request and known terms in the title", () => {
    const spans = highlightTerms(
      "Sell the first anti-microbial keyboard",
      ["anti-microbial keyboard"],
      ["keyboard"],
    );
    expect(spans).toEqual([
      { text: "Sell the first ", kind: "plain" },
      { text: "anti-microbial keyboard", kind: "rt" },
    ]);
  });

  it("longest surface wins over its own substring", () => {
    const spans = highlightTerms("light laptop stand", ["light laptop"], ["laptop"]);
    expect(spans.map((s) => s.kind)).toEqual(["rt", "plain"]);
    expect(spans[0].text).toBe("light laptop");
  });

  it("is case-insensitive and whole-word", () => {
    const spans = highlightTerms("Dell E Slim keyboards", [], ["dell e slim"]);
    expect(spans[0]).toEqual({ text: "Dell E Slim", kind: "kt" });
    // "keyboards" is not the surface "keyboard"
    const other = highlightTerms("keyboards", [], ["keyboard"]);
    expect(other).toEqual([{ text: "keyboards", kind: "plain" }]);
  });

  it("survives punctuation between term words", () => {
    const spans = highlightTerms(
      "Touchscreen Option For Dell Inspiron Mini / Dell E",
      ["touchscreen option"],
      ["dell inspiron mini", "dell e"],
    );
    const marked = spans.filter((s) => s.kind !== "plain").map((s) => s.kind);
    expect(marked).toEqual(["rt", "kt", "kt"]);
  });

  it("no terms means one plain span", () => {
    expect(highlightTerms("Nothing here", [], [])).toEqual([
      { text: "Nothing here", kind: "plain" },
    ]);
  });
});
