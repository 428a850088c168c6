use url::Url;

/// Second-level labels under which registrations happen one level deeper.
const MULTI_PART_SUFFIXES: &[&str] = &[
    "ac.uk", "co.uk", "gov.uk", "ltd.uk", "me.uk", "net.uk", "org.uk", "plc.uk",
    "com.au", "net.au", "org.au", "edu.au", "gov.au",
    "co.nz", "net.nz", "org.nz",
    "co.jp", "ne.jp", "or.jp", "ac.jp",
    "com.br", "net.br", "org.br",
    "com.cn", "net.cn", "org.cn",
    "co.in", "net.in", "org.in",
    "co.za", "org.za",
    "com.mx", "com.ar", "com.tr", "com.sg", "com.hk", "com.tw",
    "co.kr", "or.kr", "co.il",
];

/// Registrable domain of a URL: the last two host labels, or three when the
/// last two form a known multi-part suffix. IP hosts are returned as is.
/// Returns `None` if the URL has no host.
pub fn registrable_domain(url: &str) -> Option<String> {
    let parsed = Url::parse(url).ok()?;
    let host = parsed.host()?;
    let host = match host {
        url::Host::Domain(d) => d.trim_end_matches('.').to_lowercase(),
        other => return Some(other.to_string()),
    };
    let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
    if labels.is_empty() {
        return None;
    }
    let take = if labels.len() >= 3 {
        let last_two = labels[labels.len() - 2..].join(".");
        if MULTI_PART_SUFFIXES.contains(&last_two.as_str()) {
            3
        } else {
            2
        }
    } else {
        labels.len()
    };
    Some(labels[labels.len() - take..].join("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn takes_last_two_labels() {
        assert_eq!(registrable_domain("https://www.imdb.com/name/x").as_deref(), Some("imdb.com"));
        assert_eq!(registrable_domain("http://en.m.Wikipedia.ORG/").as_deref(), Some("wikipedia.org"));
        assert_eq!(registrable_domain("http://localhost:8080/").as_deref(), Some("localhost"));
    }

    #[test]
    fn handles_multi_part_suffixes() {
        assert_eq!(registrable_domain("https://www.bbc.co.uk/news").as_deref(), Some("bbc.co.uk"));
        assert_eq!(registrable_domain("https://co.uk/").as_deref(), Some("co.uk"));
    }

    #[test]
    fn ip_and_garbage() {
        assert_eq!(registrable_domain("http://127.0.0.1/x").as_deref(), Some("127.0.0.1"));
        assert_eq!(registrable_domain("no scheme"), None);
        assert_eq!(registrable_domain("mailto:a@b.com"), None);
    }
}
