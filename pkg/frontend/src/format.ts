/** Display helpers.
 *
 * The engine owns all numerics: panels echo payload values verbatim via
 * `show`, so what the planner reads is byte-equal to what the API returned.
 * Formatting here is limited to unit labels and sign affordances wrapped
 * AROUND the raw value.
 */

export function show(value: number | string | null | undefined): string {
  if (value === null || value === undefined) return "-";
  return String(value);
}

export function days(value: number): string {
  return `${show(value)} d`;
}

export function kusd(value: number): string {
  return `${show(value)} kUSD`;
}

export function signClass(value: number): string {
  if (value > 0) return "delta-worse";
  if (value < 0) return "delta-better";
  return "delta-zero";
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
