/**
 * Live validation of file-filter inputs against the project file list.
 * Mirrors the service's include semantics (prefix, `*` within a segment,
 * `**` across segments) purely to show match counts while typing; the
 * authoritative zero-match warning still comes from evaluation results.
 */

function globToRegex(pattern: string): RegExp {
  let out = '';
  let i = 0;
  while (i < pattern.length) {
    const c = pattern[i]!;
    if (c === '*') {
      if (pattern.startsWith('**', i)) {
        out += '.*';
        i += 2;
      } else {
        out += '[^/]*';
        i += 1;
      }
    } else {
      out += c.replace(/[.*+?^${}()|[\]\\]/g, '\\$&');
      i += 1;
    }
  }
  return new RegExp(`^${out}$`);
}

export function includeMatches(include: string, path: string): boolean {
  const normalized = include.replace(/\\/g, '/').replace(/^\/+/, '');
  if (normalized.includes('*')) {
    return globToRegex(normalized).test(path);
  }
  return path.startsWith(normalized);
}

export function countMatches(include: string, paths: string[]): number {
  if (!include) {
    return paths.length;
  }
  return paths.filter((p) => includeMatches(include, p)).length;
}
