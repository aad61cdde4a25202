/** Display helpers for the progress screen. */

export function formatAgreement(value: number | null): string {
  return value === null ? "not yet computable" : value.toFixed(2);
}

export function formatProgress(done: number, total: number): string {
  const percent = total === 0 ? 0 : Math.round((100 * done) / total);
  return `${done}/${total} (${percent}%)`;
}
