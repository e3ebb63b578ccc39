/**
 * Word-level diff between the raw utterance and the resolved query.
 *
 * The service rewrites questions server-side (pronoun -> topic phrase); the
 * UI only needs to show *which* words of the resolved query are new. Spans
 * cover the resolved string exactly (concatenating them reproduces it), with
 * `changed` marking words absent from the raw utterance. Purely
 * presentational — the displayed text itself stays verbatim.
 */

export interface Span {
  text: string;
  changed: boolean;
}

/** Longest common subsequence over words; returns matched resolved indices. */
function matchedIndices(rawWords: string[], resolvedWords: string[]): Set<number> {
  const n = rawWords.length;
  const m = resolvedWords.length;
  // lcs[i][j] = LCS length of rawWords[i:] and resolvedWords[j:].
  const lcs: number[][] = Array.from({ length: n + 1 }, () => new Array(m + 1).fill(0));
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      lcs[i][j] =
        rawWords[i] === resolvedWords[j]
          ? lcs[i + 1][j + 1] + 1
          : Math.max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  const matched = new Set<number>();
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (rawWords[i] === resolvedWords[j]) {
      matched.add(j);
      i++;
      j++;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      i++;
    } else {
      j++;
    }
  }
  return matched;
}

/**
 * Split `resolved` into spans, marking words that do not appear in `raw`
 * (in order). Whitespace between two changed words is folded into the
 * highlighted span so a multi-word substitution reads as one block.
 */
export function diffSpans(raw: string, resolved: string): Span[] {
  const chunks = resolved.match(/\S+|\s+/g) ?? [];
  const rawWords = raw.match(/\S+/g) ?? [];
  const resolvedWords = chunks.filter((c) => !/^\s+$/.test(c));
  const matched = matchedIndices(rawWords, resolvedWords);

  const spans: Span[] = [];
  let wordIndex = 0;
  for (const chunk of chunks) {
    const isSpace = /^\s+$/.test(chunk);
    const changed = isSpace ? false : !matched.has(wordIndex);
    if (!isSpace) wordIndex++;
    spans.push({ text: chunk, changed });
  }

  // Merge runs: adjacent changed words absorb the whitespace between them,
  // and consecutive spans with equal `changed` collapse into one.
  const merged: Span[] = [];
  for (let idx = 0; idx < spans.length; idx++) {
    const span = spans[idx];
    let effective = span.changed;
    if (
      /^\s+$/.test(span.text) &&
      idx > 0 &&
      idx + 1 < spans.length &&
      spans[idx - 1].changed &&
      spans[idx + 1].changed
    ) {
      effective = true;
    }
    const last = merged[merged.length - 1];
    if (last !== undefined && last.changed === effective) {
      last.text += span.text;
    } else {
      merged.push({ text: span.text, changed: effective });
    }
  }
  return merged;
}
